#ifndef GERBEJLO_SCENARIO_HPP
#define GERBEJLO_SCENARIO_HPP

// Key-value scenario files with a small expression language for the
// connection and cocycle rules.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gerbe.hpp"
#include "jlo.hpp"

namespace gerbejlo {

struct Location {
    int line = 1;
    int column = 1;
    std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
};

class ScenarioSyntaxError : public ScenarioError {
public:
    ScenarioSyntaxError(const std::string& source, Location at, const std::string& message)
        : ScenarioError(source + ":" + at.str() + ": " + message), location_(at) {}
    Location location() const { return location_; }

private:
    Location location_;
};

// Values of group coordinates visible to a rule: g0, g1, .. and h0, h1, ..
struct Bindings {
    int dim = 1;
    int order = 1;
    std::map<std::string, long long> coordinates;

    static Bindings of(int dim, int order, const GroupElement& g, const std::optional<GroupElement>& h = std::nullopt) {
        Bindings b{dim, order, {}};
        for (std::size_t i = 0; i < g.coords.size(); ++i) b.coordinates["g" + std::to_string(i)] = g.coords[i];
        if (h)
            for (std::size_t i = 0; i < h->coords.size(); ++i) b.coordinates["h" + std::to_string(i)] = h->coords[i];
        return b;
    }
};

// Expression over group coordinates evaluating to a form on the torus.
// Grammar, loosest first:
//   expr    := cmp ('?' expr ':' expr)?
//   cmp     := sum (('==' | '!=' | '<' | '<=' | '>' | '>=') sum)?
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?
//   atom    := integer | name | name '(' expr (',' expr)* ')' | '(' expr ')'
// Names: g<i>, h<i>, zeta, dx<j> (1-based); functions e(k_1, .., k_m) and mod(a, n).
// '*' is the wedge product; comparisons and mod act on rational constants.
class Expression {
public:
    Expression() : Expression(parse("0")) {}

    static Expression parse(std::string_view text, const std::string& source = "<expr>", Location origin = {}) {
        Parser p{text, source, origin, 0};
        p.skip_space();
        NodePtr root = p.ternary();
        p.skip_space();
        if (!p.at_end()) p.fail("unexpected '" + std::string(1, p.peek()) + "'");
        return Expression(std::move(root));
    }

    ManifoldForm evaluate(const Bindings& b) const { return eval(*root_, b); }

    // Names the expression reads, with their first locations.
    std::map<std::string, Location> variables() const {
        std::map<std::string, Location> out;
        collect(*root_, out);
        return out;
    }

    // Fully parenthesized canonical text; parsing it gives back the same text.
    std::string str() const { return print(*root_); }

    friend bool operator==(const Expression& a, const Expression& b) { return a.str() == b.str(); }

private:
    enum class Kind { number, variable, call, negate, binary, ternary };
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    struct Node {
        Kind kind;
        Location at;
        std::string text;  // variable or function name, operator, or integer literal
        std::vector<NodePtr> children;
    };

    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    struct Parser {
        std::string_view text;
        const std::string& source;
        Location origin;
        std::size_t pos;

        bool at_end() const { return pos >= text.size(); }
        char peek() const { return at_end() ? '\0' : text[pos]; }
        Location here() const { return Location{origin.line, origin.column + static_cast<int>(pos)}; }
        [[noreturn]] void fail(const std::string& msg) const { throw ScenarioSyntaxError(source, here(), msg); }
        void skip_space() {
            while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
        }
        bool accept(std::string_view tok) {
            skip_space();
            if (text.substr(pos, tok.size()) == tok) {
                pos += tok.size();
                return true;
            }
            return false;
        }
        void expect(char c) {
            if (!accept(std::string_view(&c, 1))) fail(std::string("expected '") + c + "'");
        }
        static NodePtr make(Kind k, Location at, std::string text, std::vector<NodePtr> children = {}) {
            return std::make_shared<const Node>(Node{k, at, std::move(text), std::move(children)});
        }

        NodePtr ternary() {
            NodePtr c = comparison();
            skip_space();
            const Location at = here();
            if (!accept("?")) return c;
            NodePtr a = ternary();
            expect(':');
            NodePtr b = ternary();
            return make(Kind::ternary, at, "?", {c, a, b});
        }
        NodePtr comparison() {
            NodePtr l = sum();
            skip_space();
            const Location at = here();
            for (std::string_view op : {"==", "!=", "<=", ">=", "<", ">"})
                if (accept(op)) return make(Kind::binary, at, std::string(op), {l, sum()});
            return l;
        }
        NodePtr sum() {
            NodePtr l = product();
            for (;;) {
                skip_space();
                const Location at = here();
                if (accept("+")) l = make(Kind::binary, at, "+", {l, product()});
                else if (accept("-")) l = make(Kind::binary, at, "-", {l, product()});
                else return l;
            }
        }
        NodePtr product() {
            NodePtr l = unary();
            for (;;) {
                skip_space();
                const Location at = here();
                if (accept("*")) l = make(Kind::binary, at, "*", {l, unary()});
                else if (accept("/")) l = make(Kind::binary, at, "/", {l, unary()});
                else return l;
            }
        }
        NodePtr unary() {
            skip_space();
            const Location at = here();
            if (accept("-")) return make(Kind::negate, at, "-", {unary()});
            return power();
        }
        NodePtr power() {
            NodePtr base = atom();
            skip_space();
            const Location at = here();
            if (accept("^")) return make(Kind::binary, at, "^", {base, unary()});
            return base;
        }
        NodePtr atom() {
            skip_space();
            const Location at = here();
            if (at_end()) fail("unexpected end of expression");
            if (accept("(")) {
                NodePtr inner = ternary();
                expect(')');
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                std::size_t start = pos;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
                return make(Kind::number, at, std::string(text.substr(start, pos - start)));
            }
            if (std::isalpha(static_cast<unsigned char>(peek()))) {
                std::size_t start = pos;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos;
                std::string name(text.substr(start, pos - start));
                if (!accept("(")) return make(Kind::variable, at, std::move(name));
                std::vector<NodePtr> args{ternary()};
                while (accept(",")) args.push_back(ternary());
                expect(')');
                return make(Kind::call, at, std::move(name), std::move(args));
            }
            fail("unexpected '" + std::string(1, peek()) + "'");
        }
    };

    static ScenarioError error(const Node& n, const std::string& msg) { return ScenarioError("at " + n.at.str() + ": " + msg); }

    static Rational constant(const ManifoldForm& f, const Node& n) {
        if (f.is_zero()) return Rational(0);
        if (f.terms().size() == 1) {
            const auto& [key, c] = *f.terms().begin();
            bool flat = key.second == 0;
            for (int k : key.first) flat = flat && k == 0;
            if (flat && c.is_rational()) return c.coords()[0];
        }
        throw error(n, "expected a rational constant, got " + f.str());
    }

    static long long integer(const ManifoldForm& f, const Node& n) {
        Rational q = constant(f, n);
        if (q.get_den() != 1 || !q.get_num().fits_slong_p()) throw error(n, "expected an integer, got " + q.get_str());
        return q.get_num().get_si();
    }

    static ManifoldForm number(int dim, const Rational& q) { return ManifoldForm::constant(dim, Scalar(q)); }

    static ManifoldForm eval(const Node& n, const Bindings& b) {
        switch (n.kind) {
            case Kind::number: return number(b.dim, Rational(mpz_class(n.text)));
            case Kind::variable: {
                if (auto it = b.coordinates.find(n.text); it != b.coordinates.end()) return number(b.dim, Rational(static_cast<long>(it->second)));
                if (n.text == "zeta") return ManifoldForm::constant(b.dim, Scalar::zeta_power(b.order, 1));
                if (n.text.size() > 2 && n.text.starts_with("dx")) {
                    const int j = std::stoi(n.text.substr(2));
                    if (j < 1 || j > b.dim) throw error(n, n.text + " is outside dimension " + std::to_string(b.dim));
                    return ManifoldForm::dx(b.dim, j - 1);
                }
                throw error(n, "unknown name '" + n.text + "'");
            }
            case Kind::call: {
                std::vector<ManifoldForm> args;
                for (const auto& c : n.children) args.push_back(eval(*c, b));
                if (n.text == "e") {
                    if (static_cast<int>(args.size()) != b.dim)
                        throw error(n, "e(..) takes " + std::to_string(b.dim) + " lattice coordinates");
                    Lattice k;
                    for (std::size_t i = 0; i < args.size(); ++i) k.push_back(static_cast<int>(integer(args[i], *n.children[i])));
                    return ManifoldForm::exp_mode(b.dim, std::move(k));
                }
                if (n.text == "mod") {
                    if (args.size() != 2) throw error(n, "mod(a, n) takes two arguments");
                    const long long a = integer(args[0], *n.children[0]), m = integer(args[1], *n.children[1]);
                    if (m <= 0) throw error(n, "mod needs a positive modulus");
                    return number(b.dim, Rational(static_cast<long>(((a % m) + m) % m)));
                }
                throw error(n, "unknown function '" + n.text + "'");
            }
            case Kind::negate: return -eval(*n.children[0], b);
            case Kind::ternary: {
                const bool cond = constant(eval(*n.children[0], b), *n.children[0]) != 0;
                return eval(*n.children[cond ? 1 : 2], b);
            }
            case Kind::binary: break;
        }
        const ManifoldForm l = eval(*n.children[0], b), r = eval(*n.children[1], b);
        const std::string& op = n.text;
        if (op == "+") return l + r;
        if (op == "-") return l - r;
        if (op == "*") return l * r;
        if (op == "/") {
            const Rational q = constant(r, *n.children[1]);
            if (q == 0) throw error(n, "division by zero");
            return l.scaled(Scalar(Rational(1) / q));
        }
        if (op == "^") {
            long long e = integer(r, *n.children[1]);
            ManifoldForm base = l;
            if (e < 0) {
                base = UnitFunction::from_form(l).inverse().as_form();
                e = -e;
            }
            ManifoldForm acc = number(b.dim, Rational(1));
            for (long long i = 0; i < e; ++i) acc = acc * base;
            return acc;
        }
        const Rational x = constant(l, *n.children[0]), y = constant(r, *n.children[1]);
        bool v = false;
        if (op == "==") v = x == y;
        else if (op == "!=") v = x != y;
        else if (op == "<") v = x < y;
        else if (op == "<=") v = x <= y;
        else if (op == ">") v = x > y;
        else if (op == ">=") v = x >= y;
        return number(b.dim, Rational(v ? 1 : 0));
    }

    static void collect(const Node& n, std::map<std::string, Location>& out) {
        if (n.kind == Kind::variable) out.emplace(n.text, n.at);
        for (const auto& c : n.children) collect(*c, out);
    }

    static std::string print(const Node& n) {
        switch (n.kind) {
            case Kind::number:
            case Kind::variable: return n.text;
            case Kind::negate: return "(-" + print(*n.children[0]) + ")";
            case Kind::ternary:
                return "(" + print(*n.children[0]) + " ? " + print(*n.children[1]) + " : " + print(*n.children[2]) + ")";
            case Kind::call: {
                std::string s = n.text + "(";
                for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? ", " : "") + print(*n.children[i]);
                return s + ")";
            }
            case Kind::binary: break;
        }
        return "(" + print(*n.children[0]) + " " + n.text + " " + print(*n.children[1]) + ")";
    }

    NodePtr root_;
};

// Which suites to run and how hard to sample.
struct TestPlan {
    std::uint64_t seed = 1;
    int kmax = 2;
    int nmax = 1;
    int samples = 20;
    SignConvention sign_convention = SignConvention::graded;
    std::vector<std::string> suites;

    bool operator==(const TestPlan&) const = default;
};

struct ScenarioFile {
    std::string name = "scenario";
    int dim = 1;
    int cyclotomic = 4;
    int free_rank = 0;
    std::vector<long long> torsion;
    std::vector<AffineMap> actions;
    Expression omega;
    Expression mu = Expression::parse("1");
    TestPlan plan;

    bool operator==(const ScenarioFile& o) const {
        return name == o.name && dim == o.dim && cyclotomic == o.cyclotomic && free_rank == o.free_rank && torsion == o.torsion &&
               actions == o.actions && omega == o.omega && mu == o.mu && plan == o.plan;
    }

    AbelianGroup group() const { return AbelianGroup(free_rank, torsion); }

    GerbeScenario build() const {
        TorusAction action(group(), dim, cyclotomic, actions);
        const int m = dim, order = cyclotomic;
        const Expression om = omega, mu_rule = mu;
        return GerbeScenario(
            std::move(action), [om, m, order](const GroupElement& g) { return om.evaluate(Bindings::of(m, order, g)); },
            [mu_rule, m, order](const GroupElement& g, const GroupElement& h) {
                return UnitFunction::from_form(mu_rule.evaluate(Bindings::of(m, order, g, h)));
            });
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

struct Entry {
    std::string value;
    Location key_at;
    Location value_at;
};

}  // namespace detail

// Parses and validates a scenario; every failure carries source:line:column.
inline ScenarioFile parse_scenario_file(std::string_view text, const std::string& source = "<scenario>") {
    using detail::Entry;
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::map<std::string, Location> section_at;
    std::string current;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::size_t first = 0;
        while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
        if (first == line.size()) continue;
        const Location at{line_no, static_cast<int>(first) + 1};
        if (line[first] == '[') {
            const auto close = line.find(']', first);
            if (close == std::string_view::npos) throw ScenarioSyntaxError(source, at, "unterminated section header");
            current = detail::trim(line.substr(first + 1, close - first - 1));
            if (!detail::trim(line.substr(close + 1)).empty())
                throw ScenarioSyntaxError(source, Location{line_no, static_cast<int>(close) + 2}, "text after section header");
            if (section_at.contains(current)) throw ScenarioSyntaxError(source, at, "duplicate section [" + current + "]");
            section_at[current] = at;
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ScenarioSyntaxError(source, at, "expected 'key = value'");
        if (current.empty()) throw ScenarioSyntaxError(source, at, "key outside of any section");
        const std::string key = detail::trim(line.substr(first, eq - first));
        std::size_t vstart = eq + 1;
        while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart]))) ++vstart;
        Entry e{detail::trim(line.substr(eq + 1)), at, Location{line_no, static_cast<int>(vstart) + 1}};
        if (!sections[current].emplace(key, e).second) throw ScenarioSyntaxError(source, at, "duplicate key '" + key + "'");
    }

    auto fail = [&](Location at, const std::string& msg) -> ScenarioSyntaxError { return ScenarioSyntaxError(source, at, msg); };
    std::set<std::pair<std::string, std::string>> used;
    auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        used.emplace(sec, key);
        return &k->second;
    };
    auto to_integer = [&](const Entry& e) -> long long {
        try {
            std::size_t n = 0;
            long long v = std::stoll(e.value, &n);
            if (n == e.value.size()) return v;
        } catch (const std::exception&) {
        }
        throw fail(e.value_at, "expected an integer, got '" + e.value + "'");
    };
    auto to_rational = [&](const std::string& s, Location at) -> Rational {
        Rational q;
        if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw fail(at, "expected a rational, got '" + s + "'");
        q.canonicalize();
        return q;
    };

    ScenarioFile f;
    if (!section_at.contains("model")) throw fail(Location{}, "missing [model] section");
    if (auto e = get("model", "name")) f.name = e->value;
    if (auto e = get("model", "dim")) f.dim = static_cast<int>(to_integer(*e));
    if (auto e = get("model", "cyclotomic")) f.cyclotomic = static_cast<int>(to_integer(*e));
    if (f.dim < 1 || f.dim > 16) throw fail(section_at["model"], "dim must be between 1 and 16");
    if (f.cyclotomic < 1) throw fail(section_at["model"], "cyclotomic order must be positive");

    if (!section_at.contains("group")) throw fail(Location{}, "missing [group] section");
    if (auto e = get("group", "free_rank")) f.free_rank = static_cast<int>(to_integer(*e));
    if (f.free_rank < 0) throw fail(section_at["group"], "free_rank must be non-negative");
    if (auto e = get("group", "torsion"))
        for (const auto& item : detail::split(e->value, ',')) {
            Entry piece{item, e->key_at, e->value_at};
            const long long n = to_integer(piece);
            if (n < 1) throw fail(e->value_at, "torsion orders must be positive");
            f.torsion.push_back(n);
        }
    const int rank = f.free_rank + static_cast<int>(f.torsion.size());

    for (int i = 0; i < rank; ++i) {
        const std::string sec = "action." + std::to_string(i);
        if (!section_at.contains(sec)) throw fail(section_at["group"], "missing [" + sec + "] for generator " + std::to_string(i));
        AffineMap a = AffineMap::identity(f.dim);
        if (auto e = get(sec, "matrix")) {
            const auto rows = detail::split(e->value, ';');
            if (static_cast<int>(rows.size()) != f.dim) throw fail(e->value_at, "matrix needs " + std::to_string(f.dim) + " rows");
            for (int r = 0; r < f.dim; ++r) {
                const auto cols = detail::split(rows[static_cast<std::size_t>(r)], ',');
                if (static_cast<int>(cols.size()) != f.dim) throw fail(e->value_at, "matrix row " + std::to_string(r + 1) + " has the wrong length");
                for (int c = 0; c < f.dim; ++c)
                    a.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = to_integer(Entry{cols[static_cast<std::size_t>(c)], e->key_at, e->value_at});
            }
        }
        if (auto e = get(sec, "shift")) {
            const auto items = detail::split(e->value, ',');
            if (static_cast<int>(items.size()) != f.dim) throw fail(e->value_at, "shift needs " + std::to_string(f.dim) + " entries");
            for (int c = 0; c < f.dim; ++c) {
                const Rational q = to_rational(items[static_cast<std::size_t>(c)], e->value_at);
                Rational scaled = q * f.cyclotomic;
                scaled.canonicalize();
                if (scaled.get_den() != 1)
                    throw fail(e->value_at, "translation " + q.get_str() + " is not in (1/" + std::to_string(f.cyclotomic) + ")Z");
                a.shift[static_cast<std::size_t>(c)] = q;
            }
        }
        f.actions.push_back(std::move(a));
    }

    if (!section_at.contains("gerbe")) throw fail(Location{}, "missing [gerbe] section");
    const Entry* omega = get("gerbe", "omega");
    const Entry* mu = get("gerbe", "mu");
    if (!omega) throw fail(section_at["gerbe"], "missing omega rule");
    if (!mu) throw fail(section_at["gerbe"], "missing mu rule");
    f.omega = Expression::parse(omega->value, source, omega->value_at);
    f.mu = Expression::parse(mu->value, source, mu->value_at);
    auto check_names = [&](const Expression& ex, bool pair) {
        for (const auto& [name, at] : ex.variables()) {
            bool ok = name == "zeta";
            if (name.size() > 2 && name.starts_with("dx") && name.find_first_not_of("0123456789", 2) == std::string::npos) {
                const int j = std::stoi(name.substr(2));
                ok = j >= 1 && j <= f.dim;
            }
            for (char v : pair ? std::string("gh") : std::string("g"))
                for (int i = 0; i < rank; ++i) ok = ok || name == std::string(1, v) + std::to_string(i);
            if (!ok) throw ScenarioSyntaxError(source, at, "unknown name '" + name + "'");
        }
    };
    check_names(f.omega, false);
    check_names(f.mu, true);

    if (auto e = get("plan", "seed")) f.plan.seed = static_cast<std::uint64_t>(to_integer(*e));
    if (auto e = get("plan", "kmax")) f.plan.kmax = static_cast<int>(to_integer(*e));
    if (auto e = get("plan", "nmax")) f.plan.nmax = static_cast<int>(to_integer(*e));
    if (auto e = get("plan", "samples")) f.plan.samples = static_cast<int>(to_integer(*e));
    if (auto e = get("plan", "sign_convention")) {
        try {
            f.plan.sign_convention = parse_sign_convention(e->value);
        } catch (const std::invalid_argument& ex) {
            throw fail(e->value_at, ex.what());
        }
    }
    if (auto e = get("plan", "suites")) f.plan.suites = detail::split(e->value, ',');

    for (const auto& [sec, entries] : sections)
        for (const auto& [key, e] : entries)
            if (!used.contains({sec, key})) throw fail(e.key_at, "unknown key '" + key + "' in [" + sec + "]");

    // Build the action and probe both rules near the identity so bad data fails here, with a location.
    GerbeScenario built = [&] {
        try {
            return f.build();
        } catch (const ScenarioError& ex) {
            throw fail(section_at["group"], ex.what());
        }
    }();
    const auto window = built.group().window(1);
    for (const auto& g : window) {
        try {
            built.omega(g);
        } catch (const ScenarioError& ex) {
            throw fail(omega->value_at, std::string("omega at ") + g.str() + ": " + ex.what());
        }
        for (const auto& h : window) {
            try {
                built.mu(g, h);
            } catch (const ScenarioError& ex) {
                throw fail(mu->value_at, std::string("mu at ") + g.str() + "," + h.str() + ": " + ex.what());
            }
        }
    }
    return f;
}

inline GerbeScenario parse_scenario(std::string_view text, const std::string& source = "<scenario>") {
    return parse_scenario_file(text, source).build();
}

inline std::string serialize(const ScenarioFile& f) {
    std::ostringstream os;
    os << "[model]\nname = " << f.name << "\ndim = " << f.dim << "\ncyclotomic = " << f.cyclotomic << "\n\n";
    os << "[group]\nfree_rank = " << f.free_rank << "\ntorsion = ";
    for (std::size_t i = 0; i < f.torsion.size(); ++i) os << (i ? ", " : "") << f.torsion[i];
    os << "\n";
    for (std::size_t i = 0; i < f.actions.size(); ++i) {
        const auto& a = f.actions[i];
        os << "\n[action." << i << "]\nmatrix = ";
        for (std::size_t r = 0; r < a.matrix.size(); ++r) {
            os << (r ? "; " : "");
            for (std::size_t c = 0; c < a.matrix[r].size(); ++c) os << (c ? ", " : "") << a.matrix[r][c];
        }
        os << "\nshift = ";
        for (std::size_t c = 0; c < a.shift.size(); ++c) os << (c ? ", " : "") << a.shift[c].get_str();
        os << "\n";
    }
    os << "\n[gerbe]\nomega = " << f.omega.str() << "\nmu = " << f.mu.str() << "\n";
    os << "\n[plan]\nseed = " << f.plan.seed << "\nkmax = " << f.plan.kmax << "\nnmax = " << f.plan.nmax << "\nsamples = " << f.plan.samples
       << "\nsign_convention = " << to_string(f.plan.sign_convention) << "\nsuites = ";
    for (std::size_t i = 0; i < f.plan.suites.size(); ++i) os << (i ? ", " : "") << f.plan.suites[i];
    os << "\n";
    return os.str();
}

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 15];
    return out;
}

// FNV-1a over the canonical text.
inline std::string scenario_digest(const ScenarioFile& f) { return hex64(fnv1a(serialize(f))); }

}  // namespace gerbejlo

#endif
