#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "gerbejlo/checks.hpp"
#include "gerbejlo/jlo.hpp"
#include "gerbejlo/morphisms.hpp"
#include "gerbejlo/report.hpp"
#include "gerbejlo/scenario.hpp"
#include "support.hpp"

using namespace gerbejlo;
namespace support = gerbejlo::testing;
using support::Gen;

namespace {

std::string read_scenario(const std::string& name) {
    std::ifstream in(std::string(GERBEJLO_SCENARIO_DIR) + "/" + name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ScenarioFile load(const std::string& name) { return parse_scenario_file(read_scenario(name), name); }

std::vector<EndAlgebra> random_args(Gen& gen, const GerbeScenario& s, int n, int entries = 4) {
    std::vector<EndAlgebra> r;
    for (int i = 0; i < n; ++i) r.push_back(gen.end_element(s, entries));
    return r;
}

// Entry (p, q) of [a, e^{-th}] and of -int_{Delta^1} e^{-s0 th} [a, th] e^{-s1 th}
// for a diagonal th with entries x at p and y at q.
std::pair<MixedForm, MixedForm> quillen_sides(const MixedForm& x, const MixedForm& y, const MixedForm& a) {
    const MixedForm lhs = a * exp_nilpotent(y, 0, 1).integrate() - exp_nilpotent(x, 0, 1).integrate() * a;
    const SigmaPolynomial integrand = exp_nilpotent(x, 0, 2) * (a * y - x * a) * exp_nilpotent(y, 1, 2);
    return {lhs, -integrand.integrate()};
}

}  // namespace

TEST(Quillen, CommutatorWithTheHeatKernelIsAnIntegral) {
    Gen gen(61);
    int nontrivial = 0;
    for (const auto& s : {support::quarter_turn_gerbe(), support::inversion_gerbe()}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto t = gen.tuple(s.group(), gen.uniform(0, 2));
            const auto theta = vartheta(s, t).rescaled();
            const auto p = gen.element(s.group(), 1), q = gen.element(s.group(), 1);
            const Scalar c(gen.rational(3));
            const MixedForm x = theta.entry(p).scaled(c), y = theta.entry(q).scaled(c);
            const MixedForm a = MixedForm::from_manifold(gen.function(s.dim(), 4), static_cast<int>(t.size()));
            const auto [lhs, rhs] = quillen_sides(x, y, a);
            EXPECT_EQ(lhs, rhs) << "tuple " << tuple_str(t);
            nontrivial += !lhs.is_zero();
        }
    }
    EXPECT_GT(nontrivial, 5);
}

TEST(Jlo, LinearInTheForm) {
    const auto s = support::quarter_turn_gerbe();
    const auto w1 = support::random_compatible_form(s, 3), w2 = support::random_compatible_form(s, 4);
    JLOCharacter t1(s, w1), t2(s, w2), sum(s, w1 + w2), scaled(s, w1.scaled(Scalar::zeta_power(4, 1)));
    Gen gen(62);
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = draw_chain_sample(gen, s, 2, 2);
        EXPECT_EQ(sum(x.tuple, x.leading, x.rest), t1(x.tuple, x.leading, x.rest) + t2(x.tuple, x.leading, x.rest));
        EXPECT_EQ(scaled(x.tuple, x.leading, x.rest), t1(x.tuple, x.leading, x.rest).scaled(Scalar::zeta_power(4, 1)));
    }
}

TEST(Jlo, MultilinearInTheArguments) {
    const auto s = support::inversion_gerbe();
    JLOCharacter tau(s, support::random_compatible_form(s, 5));
    Gen gen(63);
    int nonzero = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto x = draw_chain_sample(gen, s, 2, 2);
        const Scalar c = gen.nonzero_scalar(4);
        const EndAlgebra extra = gen.end_element(s, 6);
        const Unitized<EndAlgebra> lead2 = Unitized<EndAlgebra>::of(gen.end_element(s, 6));
        Unitized<EndAlgebra> combined{x.leading.element.scaled(c) + lead2.element, x.leading.unit * c};
        const UScalar base = tau(x.tuple, x.leading, x.rest);
        EXPECT_EQ(tau(x.tuple, combined, x.rest), base.scaled(c) + tau(x.tuple, lead2, x.rest));
        for (std::size_t slot = 0; slot < x.rest.size(); ++slot) {
            auto rest = x.rest, other = x.rest;
            rest[slot] = x.rest[slot].scaled(c) + extra;
            other[slot] = extra;
            EXPECT_EQ(tau(x.tuple, x.leading, rest), base.scaled(c) + tau(x.tuple, x.leading, other));
        }
        nonzero += !base.is_zero();
    }
    EXPECT_GT(nonzero, 3);
}

TEST(Jlo, ChainMapUnderTheGradedConvention) {
    for (const auto& s : {support::quarter_turn_gerbe(), support::inversion_gerbe(), support::integer_gerbe()}) {
        Gen gen(64);
        std::vector<ChainSample> samples;
        for (int i = 0; i < 8; ++i) samples.push_back(draw_chain_sample(gen, s, 2, 1));
        const auto rep = chain_check(s, support::random_compatible_form(s, 9, 2), samples, SignConvention::graded);
        EXPECT_TRUE(rep.passed()) << *rep.failure;
        EXPECT_GT(rep.nondegenerate, 2);
    }
}

TEST(Jlo, UniformConventionsFailOnOddLevels) {
    const auto s = support::quarter_turn_gerbe();
    const auto omega = support::random_compatible_form(s, 9, 2);
    Gen gen(65);
    bool theorem_broken = false, proof_broken = false;
    for (int i = 0; i < 12; ++i) {
        auto x = draw_chain_sample(gen, s, 2, 1);
        if (i % 2) x.tuple = gen.tuple(s.group(), 1);
        const auto terms = chain_terms(s, omega, x);
        EXPECT_TRUE(terms.holds(SignConvention::graded));
        if (terms.level % 2 == 0) {
            EXPECT_TRUE(terms.holds(SignConvention::theorem));
        }
        theorem_broken = theorem_broken || !terms.holds(SignConvention::theorem);
        proof_broken = proof_broken || !terms.holds(SignConvention::proof);
    }
    EXPECT_TRUE(theorem_broken);
    EXPECT_TRUE(proof_broken);
}

TEST(Regrade, HomotopyPowersCommuteWithTheCoboundary) {
    // delta~ (Dh)^i = (Dh)^i delta~ - (Dh)^{i-1} D away from degree 0, on normalized cochains
    const auto s = support::quarter_turn_gerbe();
    const auto mod = s.end_module();
    Gen gen(66);
    int nonzero = 0;
    for (int trial = 0; trial < 4; ++trial) {
        const auto c =
            psi0(mod, support::random_group_cochain<support::NormalizedTraceCochain>(s, 70 + trial, CochainFlavor::inhomogeneous)).memoized();
        auto dh = [&](GroupCochain<EndAlgebra> f, int times) {
            for (int j = 0; j < times; ++j) f = minus_dh(mod, f).scaled(Scalar(-1));
            return f;
        };
        for (int i = 1; i <= 3; ++i) {
            const auto t = gen.tuple(s.group(), 2);
            const auto a0 = Unitized<EndAlgebra>::of(gen.end_element(s, 3));
            const auto args = random_args(gen, s, gen.uniform(0, 1), 3);
            const UScalar lhs = homogeneous_delta(dh(c, i))(t, a0, args);
            const UScalar rhs = dh(homogeneous_delta(c), i)(t, a0, args) - dh(column_differential(c), i - 1)(t, a0, args);
            EXPECT_EQ(lhs, rhs) << "i=" << i << " tuple " << tuple_str(t);
            nonzero += !lhs.is_zero();
        }
    }
    EXPECT_GT(nonzero, 3);
}

TEST(Regrade, SignTurnsTheTotalDifferentialIntoTheDoubleComplex) {
    const auto s = support::quarter_turn_gerbe();
    const auto mod = s.end_module();
    const auto f = psi0(mod, support::random_group_cochain(s, 80, CochainFlavor::inhomogeneous)).memoized();
    Gen gen(67);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = gen.tuple(s.group(), gen.uniform(2, 3));
        const auto a0 = Unitized<EndAlgebra>::of(gen.end_element(s, 3));
        const auto args = random_args(gen, s, gen.uniform(0, 2), 3);
        const long k = static_cast<long>(t.size()) - 1, n = static_cast<long>(args.size());
        // R((b + uB) f + (-1)^{k+n} delta~ f) = (delta~ + D) R f, with group degree k and cyclic degree n of the result
        const UScalar lhs = regrade(f.pointwise([](const auto& c) { return b_plus_uB(c); }, "bB") +
                                    cyclic_degree_sign(homogeneous_delta(f)).scaled(Scalar(k % 2 ? -1 : 1)))(t, a0, args);
        const UScalar rhs = (homogeneous_delta(regrade(f)) + column_differential(regrade(f)))(t, a0, args);
        EXPECT_EQ(lhs, rhs) << "k=" << k << " n=" << n;
    }
}

TEST(Psi1, ImageIsInvariantAndIntertwinesTheDifferentials) {
    const auto s = support::quarter_turn_gerbe();
    const auto mod = s.end_module();
    Gen gen(3);
    int nonzero = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const auto raw = psi0(mod, support::random_group_cochain(s, 40 + trial, CochainFlavor::inhomogeneous));
        const auto c = (raw.restricted_to_degree(0) + raw.restricted_to_degree(1)).memoized();
        const auto total = (homogeneous_delta(c) + column_differential(c)).memoized();
        const auto image = psi1(mod, c, 2);
        const auto a0 = Unitized<EndAlgebra>::of(gen.end_element(s, 4));
        const auto args = random_args(gen, s, gen.uniform(0, 2));
        const auto g = gen.element(s.group()), h = gen.element(s.group());
        EXPECT_TRUE(homogeneous_delta(image)({g, h}, a0, args).is_zero());
        const UScalar lhs = psi1(mod, total, 2)({s.group().identity()}, a0, args);
        const UScalar rhs = b_plus_uB(image.at({s.group().identity()}))(a0, args);
        EXPECT_EQ(lhs, rhs);
        nonzero += !rhs.is_zero();
    }
    EXPECT_GT(nonzero, 2);
}

TEST(Psi2, CommutesWithHochschildAndConnesOnInvariantTraces) {
    auto sp = std::make_shared<const GerbeScenario>(support::quarter_turn_gerbe());
    const auto& s = *sp;
    Gen gen(90);
    int nonzero = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto c = support::invariant_trace_cochain(s, 300 + trial);
        const int n = gen.uniform(0, 3);
        auto a0 = Unitized<LSection>::of(gen.section(sp, gen.uniform(1, 3)));
        if (gen.coin()) a0.unit = gen.scalar(4);
        std::vector<LSection> args;
        for (int i = 0; i < n + 1; ++i) args.push_back(gen.section(sp, gen.uniform(1, 3)));
        std::vector<LSection> fewer(args.begin(), args.end() - 1);
        const UScalar b_lhs = hochschild_b(psi2(s, c))(a0, args), b_rhs = psi2(s, hochschild_b(c))(a0, args);
        EXPECT_EQ(b_lhs, b_rhs) << "b, n=" << n;
        if (n > 0) {
            const UScalar B_lhs = connes_B(psi2(s, c))(a0, fewer), B_rhs = psi2(s, connes_B(c))(a0, fewer);
            EXPECT_EQ(B_lhs, B_rhs) << "B, n=" << n;
            nonzero += !B_lhs.is_zero();
        }
        nonzero += !b_lhs.is_zero();
    }
    EXPECT_GT(nonzero, 4);
}

TEST(Psi2, LastArgumentUsesTheClosingIndexPair) {
    auto sp = std::make_shared<const GerbeScenario>(support::quarter_turn_gerbe());
    const auto& s = *sp;
    const auto& G = s.group();
    const auto g1 = G.make({1}), g2 = G.make({3});
    std::vector<std::pair<GroupElement, GroupElement>> seen;
    CyclicCochain<EndAlgebra> probe(
        [&seen](const Unitized<EndAlgebra>&, const std::vector<EndAlgebra>& r) {
            for (const auto& a : r)
                for (const auto& [idx, f] : a.entries()) seen.push_back(idx);
            return UScalar();
        },
        "probe");
    LSection a0(sp), a1(sp), a2(sp);
    a0.add(G.identity(), ManifoldForm::constant(1, Scalar(1)));
    a1.add(g1, ManifoldForm::constant(1, Scalar(1)));
    a2.add(g2, ManifoldForm::constant(1, Scalar(1)));
    psi2(s, probe)(Unitized<LSection>::of(a0), {a1, a2});
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_EQ(seen[0], std::make_pair(G.identity(), g1));
    EXPECT_EQ(seen[1], std::make_pair(g1, G.mul(g1, g2)));
}

TEST(Pipeline, ChainMapOnTheCircle) {
    auto sp = std::make_shared<const GerbeScenario>(support::quarter_turn_gerbe());
    Pipeline phi{*sp, sp->dim() + 2, {}};
    Gen gen(11);
    std::vector<PipelineSample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(draw_pipeline_sample(gen, sp, 1));
    const auto rep = pipeline_check(phi, pipeline_form(*sp, 12), samples);
    EXPECT_TRUE(rep.passed()) << *rep.failure;
    EXPECT_EQ(rep.checks, 3);
}

TEST(Pipeline, CorruptedCocycleIsCaught) {
    const auto file = load("s1.scn");
    const auto& G = file.group();
    const auto bad = file.build().with_corrupted_mu(G.make({1}), G.make({2}), UnitFunction{Scalar::zeta_power(4, 1), Lattice{0}});
    CheckRunner runner(file, bad, RunOptions::from_plan(file.plan));
    const auto result = runner.run("validate");
    const auto it = std::find_if(result.checks.begin(), result.checks.end(), [](const auto& c) { return c.id == "mu-cocycle"; });
    ASSERT_NE(it, result.checks.end());
    EXPECT_EQ(it->status, CheckStatus::fail);
    EXPECT_FALSE(it->witness.empty());
    EXPECT_FALSE(result.passed());
}

TEST(Scenario, FileMatchesTheHandBuiltFixture) {
    const auto built = load("s1.scn").build();
    const auto fixture = support::quarter_turn_gerbe();
    for (const auto& g : fixture.group().window(0)) {
        EXPECT_EQ(built.omega(g), fixture.omega(g));
        for (const auto& h : fixture.group().window(0)) EXPECT_EQ(built.mu(g, h), fixture.mu(g, h));
    }
}

TEST(Scenario, SerializeThenParseIsTheIdentity) {
    for (const auto* name : {"s1.scn", "s2.scn", "trivial.scn", "zinf.scn"}) {
        const auto file = load(name);
        const auto text = serialize(file);
        const auto again = parse_scenario_file(text, name);
        EXPECT_EQ(again, file) << name;
        EXPECT_EQ(serialize(again), text) << name;
    }
}

TEST(Scenario, CanonicalExpressionTextIsAFixedPoint) {
    for (const auto* text : {"g0 * e(1) * dx1", "zeta^(g0 * h0) * e(-g0, 1)", "g0 >= 2 ? 1/2 : -3", "-(dx1 + 2 * dx2) * mod(g0 + 5, 3)"}) {
        const auto e = Expression::parse(text);
        EXPECT_EQ(Expression::parse(e.str()).str(), e.str()) << text;
    }
}

TEST(Scenario, ErrorsCarryTheirLocation) {
    auto expect_error_at = [](const std::string& text, int line) {
        try {
            parse_scenario_file(text, "case.scn");
            ADD_FAILURE() << "accepted:\n" << text;
        } catch (const ScenarioSyntaxError& e) {
            EXPECT_EQ(e.location().line, line) << e.what();
            EXPECT_NE(std::string(e.what()).find("case.scn:"), std::string::npos);
        }
    };
    const std::string head = "[model]\ndim = 1\n[group]\ntorsion = 4\n[action.0]\nmatrix = 1\nshift = 1/4\n";
    expect_error_at(head + "[gerbe]\nomega = g0 * \nmu = 1\n", 9);
    expect_error_at(head + "[gerbe]\nomega = 0\nmu = q7\n", 10);
    expect_error_at(head + "[gerbe]\nomega = 0\nmu = 1\ncolour = 1\n", 11);
    expect_error_at("[model]\ndim = 1\ndim = 2\n", 3);
    EXPECT_THROW(parse_scenario_file(read_scenario("../tests/data/bad_denominator.scn"), "bad"), ScenarioError);
}

TEST(Report, BytesAreStableAndVersioned) {
    const auto file = load("s1.scn");
    auto options = RunOptions::from_plan(file.plan);
    options.samples = 4;
    auto render = [&] {
        CheckRunner runner(file, options);
        return render_report(runner.run("validate"), ReportContext{file.name, scenario_digest(file), options, false});
    };
    const std::string first = render();
    EXPECT_EQ(first, render());
    const auto j = nlohmann::json::parse(first);
    EXPECT_EQ(j["schema"], report_schema);
    EXPECT_EQ(j["schema_version"], report_schema_version);
    for (const auto& c : j["checks"]) {
        for (const auto* key : {"id", "anchor", "inputs_digest", "status", "witness"}) EXPECT_TRUE(c.contains(key)) << key;
        EXPECT_FALSE(c.contains("seconds"));
    }
    EXPECT_TRUE(j["summary"]["ok"].get<bool>());
}

TEST(Report, TrivialGerbeHasVanishingForm) {
    const auto file = load("trivial.scn");
    CheckRunner runner(file, RunOptions::from_plan(file.plan));
    const auto result = runner.run("validate");
    EXPECT_TRUE(result.passed());
    const auto it = std::find(result.observations.begin(), result.observations.end(), std::make_pair(std::string("dd_form_vanishes"), std::string("true")));
    EXPECT_NE(it, result.observations.end());
    const auto s1 = load("s1.scn");
    const auto other = CheckRunner(s1, RunOptions::from_plan(s1.plan)).run("validate");
    EXPECT_NE(std::find(other.observations.begin(), other.observations.end(), std::make_pair(std::string("dd_form_vanishes"), std::string("false"))),
              other.observations.end());
}
