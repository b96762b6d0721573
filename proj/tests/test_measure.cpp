#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "case_fixtures.hpp"
#include "tmp3/errors.hpp"
#include "tmp3/measure.hpp"

using namespace tmp3;

namespace {

std::vector<double> power_moments(const std::vector<double>& t, const std::vector<double>& w, int top) {
    std::vector<double> m(top + 1, 0.0);
    for (int j = 0; j <= top; ++j)
        for (std::size_t a = 0; a < t.size(); ++a) m[j] += w[a] * std::pow(t[a], j);
    return m;
}

std::vector<Atom> sorted(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    return atoms;
}

void expect_same_atoms(const AtomicMeasure& got, const AtomicMeasure& want, double tol) {
    ASSERT_EQ(got.atoms.size(), want.atoms.size());
    const auto g = sorted(got.atoms), w = sorted(want.atoms);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(g[i].x, w[i].x, tol * std::max(1.0, std::abs(w[i].x)));
        EXPECT_NEAR(g[i].y, w[i].y, tol * std::max(1.0, std::abs(w[i].y)));
        EXPECT_NEAR(g[i].w, w[i].w, tol * std::max(1.0, w[i].w));
    }
}

AtomicMeasure on_component(const CurveCase& c, std::initializer_list<double> ts, std::initializer_list<double> ws) {
    const auto comp = parametrization(c).components[0];
    AtomicMeasure mu;
    auto w = ws.begin();
    for (double t : ts) mu.atoms.push_back({comp.x(t), comp.y(t), *w++, 0});
    return mu;
}

// Subtracts growing point masses at an on-curve point until a form goes clearly indefinite.
MomentSequence push_out(const Generated& g, const CurveCase& c) {
    const CurvePoint q = sample_points(c, 1, 4242)[0];
    AtomicMeasure neg;
    double mass = 0.25 * g.moments.at(0, 0);
    for (int step = 0; step < 60; ++step, mass *= 2.0) {
        neg.atoms = {{q.x, q.y, mass, q.component}};
        MomentSequence L = g.moments;
        const MomentSequence D = generate(neg, c, g.moments.k);
        for (auto& [e, v] : L.beta) v -= D.beta.at(e);
        const Decision d = decide(L);
        if (d.verdict == Verdict::NotMomentFunctional && d.witness_available) return L;
    }
    ADD_FAILURE() << "perturbation never refuted " << to_string(c.id);
    return g.moments;
}

}  // namespace

TEST(SolveHankel, TwoAtoms) {
    // delta_{-1} + 2 delta_1
    const auto atoms = solve_hankel_R(HankelData{{3, 1, 3, 1, 3}});
    ASSERT_EQ(atoms.size(), 2u);
    EXPECT_NEAR(atoms[0].t, -1.0, 1e-10);
    EXPECT_NEAR(atoms[0].w, 1.0, 1e-10);
    EXPECT_NEAR(atoms[1].t, 1.0, 1e-10);
    EXPECT_NEAR(atoms[1].w, 2.0, 1e-10);
}

TEST(SolveHankel, SingleAtom) {
    const double c = -0.6;
    const auto atoms = solve_hankel_R(HankelData{power_moments({c}, {1.0}, 6)});
    ASSERT_EQ(atoms.size(), 1u);
    EXPECT_NEAR(atoms[0].t, c, 1e-10);
    EXPECT_NEAR(atoms[0].w, 1.0, 1e-10);
}

TEST(SolveHankel, FourRandomAtomsFlat) {
    const std::vector<double> t{-1.3, -0.2, 0.45, 1.7}, w{0.8, 1.2, 0.5, 1.4};
    const auto atoms = solve_hankel_R(HankelData{power_moments(t, w, 8)});
    ASSERT_EQ(atoms.size(), 4u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(atoms[i].t, t[i], 1e-6);
        EXPECT_NEAR(atoms[i].w, w[i], 1e-6);
    }
}

TEST(SolveHankel, PositiveDefiniteGivesNPlusOneAtoms) {
    const std::vector<double> t{-2, -1, -0.3, 0.2, 0.9, 1.5, 2.2}, w(7, 1.0);
    const auto m = power_moments(t, w, 6);  // n = 3, H is 4x4 and pd
    const auto atoms = solve_hankel_R(HankelData{m});
    EXPECT_EQ(atoms.size(), 4u);
    std::vector<double> tt, ww;
    for (const auto& a : atoms) {
        EXPECT_GT(a.w, 0.0);
        tt.push_back(a.t);
        ww.push_back(a.w);
    }
    const auto back = power_moments(tt, ww, 6);
    for (int j = 0; j <= 6; ++j) EXPECT_NEAR(back[j], m[j], 1e-7 * std::max(1.0, std::abs(m[j])));
}

TEST(SolveHankel, NotPsdHasNoMeasure) {
    EXPECT_THROW(solve_hankel_R(HankelData{{1, 0, -1}}), NoMeasure);
    // psd but not flat: m = (1, 0, 0, 0, 1) has H = [[1,0,0],[0,0,0],[0,0,1]].
    EXPECT_THROW(solve_hankel_R(HankelData{{1, 0, 0, 0, 1}}), NoMeasure);
}

TEST(Extract, CubicGraphSingleAtom) {
    const CurveCase c = make_case(CaseId::P13, {});
    AtomicMeasure mu;
    mu.atoms.push_back({2.0, 8.0, 1.0, 0});
    const Extraction ex = extract(generate(mu, c, 3));
    expect_same_atoms(ex.measure, mu, 1e-8);
}

TEST(Extract, NodalSingleAtom) {
    const CurveCase c = make_case(CaseId::P4, {});
    AtomicMeasure mu;
    mu.atoms.push_back({4.0, 6.0, 2.0, 0});
    const Extraction ex = extract(generate(mu, c, 2));
    expect_same_atoms(ex.measure, mu, 1e-8);
}

TEST(Extract, RationalTypeTwoTwoAtoms) {
    const CurveCase c = make_case(CaseId::P6, {{"a", 0.0}, {"d", 0.0}, {"e", 1.0}});
    AtomicMeasure mu;
    mu.atoms.push_back({1.0, 1.0, 1.0, 0});
    mu.atoms.push_back({0.25, 2.0, 3.0, 0});
    const Extraction ex = extract(generate(mu, c, 2));
    expect_same_atoms(ex.measure, mu, 1e-7);
}

TEST(Extract, SingularInstancesRecoverAtoms) {
    struct Instance {
        CurveCase curve;
        AtomicMeasure mu;
        int k;
    };
    const CurveCase p4 = make_case(CaseId::P4, {});
    const CurveCase p12 = make_case(CaseId::P12, {{"c", 0.0}, {"d", 1.0}, {"e", 1.0}});
    const CurveCase p6 = make_case(CaseId::P6, {{"a", 1.0}, {"d", 1.0}, {"e", 2.0}});
    AtomicMeasure p5mu;
    p5mu.atoms.push_back({0.0, 0.0, 1.5, 1});
    for (double t : {-1.2, -0.4, 0.3}) p5mu.atoms.push_back({t * t + 1, t * t * t + t, 1.0, 0});
    const std::vector<Instance> cases{
        {p4, on_component(p4, {0.5, 2.0}, {1.0, 1.0}), 2},
        {p12, on_component(p12, {0.7, -1.8}, {2.0, 2.0}), 2},
        {p6, on_component(p6, {0.5, 3.0}, {1.0, 1.0}), 2},
        {make_case(CaseId::P5, {}), p5mu, 2},
    };
    for (const auto& inst : cases) {
        const MomentSequence L = generate(inst.mu, inst.curve, inst.k);
        ASSERT_EQ(decide(L).verdict, Verdict::MomentFunctional) << to_string(inst.curve.id);
        const Extraction ex = extract(L);
        expect_same_atoms(ex.measure, inst.mu, 1e-6);
        EXPECT_LT(ex.residual, 1e-6);
    }
}

TEST(Extract, CompletionChoicesAllVerify) {
    const CurveCase c = make_case(CaseId::P4, {});
    const Generated g = generate(GenerateSpec{c, 6, 2, 55});
    const Decision d = decide(g.moments);
    ASSERT_TRUE(d.pd_interval.has_value());
    ASSERT_TRUE(d.completion_interval.has_value());
    const Interval I = *d.pd_interval;
    // Left and Right are the flat completions at the ends of the closed psd interval.
    for (CompletionChoice ch : {CompletionChoice::Midpoint, CompletionChoice::Left, CompletionChoice::Right}) {
        ExtractOptions eo;
        eo.choice = ch;
        const Extraction ex = extract(g.moments, eo);
        EXPECT_LT(ex.residual, 1e-6);
        EXPECT_TRUE(d.completion_interval->contains(ex.completion_value));
    }
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        ExtractOptions eo;
        eo.choice = CompletionChoice::Value;
        eo.value = I.at(s);
        const Extraction ex = extract(g.moments, eo);
        EXPECT_LT(ex.residual, 1e-6) << "s=" << s;
        EXPECT_LE(ex.measure.atoms.size(), 7u);
    }
}

TEST(Extract, UnsupportedCases) {
    const Generated g = generate(GenerateSpec{make_case(CaseId::P17, {}), 6, 2, 1});
    EXPECT_THROW(extract(g.moments), UnsupportedCase);
}

TEST(Extract, RoundTripConstructiveCases) {
    for (const auto& nc : fixtures::constructive_named_cases()) {
        for (int k = k_min(nc.curve.id); k <= 3; ++k) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const Generated g = generate(GenerateSpec{nc.curve, 3 * k, k, 7000 + seed});
                const Extraction ex = extract(g.moments);
                EXPECT_LT(verify(ex.measure, g.moments), 1e-6) << nc.name << " k=" << k << " seed=" << seed;
                EXPECT_LE(ex.measure.atoms.size(), static_cast<std::size_t>(3 * k + 1)) << nc.name;
                const BivarPoly P = defining_polynomial(nc.curve);
                for (const auto& a : ex.measure.atoms) {
                    EXPECT_GT(a.w, 0.0);
                    EXPECT_LT(std::abs(P.eval(a.x, a.y)), 1e-8 * std::max(1.0, g.moments.scale()));
                }
            }
        }
    }
}

TEST(Verify, Examples) {
    const CurveCase c = make_case(CaseId::P4, {});
    AtomicMeasure mu = on_component(c, {0.5, 1.5}, {1.0, 2.0});
    const MomentSequence L = generate(mu, c, 2);
    EXPECT_LT(verify(mu, L), 1e-14);
    AtomicMeasure doubled = mu;
    doubled.atoms[0].w *= 2.0;
    // beta00 moves by w = 1 out of 3; the relative residual there is 1 / (1 + 3).
    EXPECT_GE(verify(doubled, L), 0.25 - 1e-12);

    std::map<Exponent, double> zero;
    for (int d = 0; d <= 4; ++d)
        for (int i = 0; i <= d; ++i) zero[{i, d - i}] = 0.0;
    EXPECT_EQ(verify(AtomicMeasure{}, MomentSequence::from_map(c, 2, zero)), 0.0);
}

TEST(Generate, UnitAtomGivesUnitMoments) {
    AtomicMeasure mu;
    mu.atoms.push_back({1.0, 1.0, 1.0, 0});
    const MomentSequence L = generate(mu, make_case(CaseId::P3, {}), 2);
    for (const auto& [e, v] : L.beta) EXPECT_EQ(v, 1.0);
}

TEST(Generate, DeterministicAndRepresentable) {
    const GenerateSpec spec{make_case(CaseId::P4, {}), 6, 2, 123};
    const Generated a = generate(spec), b = generate(spec);
    EXPECT_EQ(a.moments.beta, b.moments.beta);
    EXPECT_EQ(decide(a.moments).verdict, Verdict::MomentFunctional);
}

TEST(Generate, ThreeLinesOnIdeal) {
    const Generated g = generate(GenerateSpec{make_case(CaseId::P26, {{"a", 1.0}, {"b", 2.0}}), 9, 3, 8});
    EXPECT_LT(check_ideal_vanishing(g.moments), 1e-10 * std::max(1.0, g.moments.scale()));
    for (const auto& a : g.measure.atoms) EXPECT_GT(a.w, 0.0);
}

TEST(Witness, NegativeMassOnNodalCurve) {
    std::map<Exponent, double> beta;
    for (int d = 0; d <= 4; ++d)
        for (int i = 0; i <= d; ++i) beta[{i, d - i}] = 0.0;
    beta[{0, 0}] = -1.0;
    const MomentSequence L = MomentSequence::from_map(make_case(CaseId::P4, {}), 2, beta);
    // L is minus the point evaluation at the node (0, 0), so every witness has L(p) = -p(0, 0).
    const Witness w = witness(L);
    EXPECT_EQ(w.source, FailedForm::Moment);
    EXPECT_GT(w.p.eval(0.0, 0.0), 0.0);
    EXPECT_NEAR(w.value, -w.p.eval(0.0, 0.0), 1e-12 * w.p.max_abs_coeff());
    EXPECT_GE(w.min_sampled, -1e-8 * w.p.max_abs_coeff());
}

TEST(Witness, NeileLocalizingFailure) {
    const CurveCase c = make_case(CaseId::P3, {});
    const Generated g = generate(GenerateSpec{c, 6, 2, 14});
    MomentSequence L = g.moments;
    // Inflate beta20 until a required form fails.
    double bump = 0.1 * L.at(2, 0);
    for (int i = 0; i < 60 && decide(L).verdict != Verdict::NotMomentFunctional; ++i, bump *= 2.0)
        L.beta[{2, 0}] = g.moments.at(2, 0) - bump;
    ASSERT_EQ(decide(L).verdict, Verdict::NotMomentFunctional);
    const Witness w = witness(L);
    EXPECT_GE(w.min_sampled, -1e-8);
    EXPECT_LT(w.value, -1e-10 * L.scale());
}

TEST(Witness, ParabolaConicFactor) {
    const CurveCase c = make_case(CaseId::P19, {});
    const Generated g = generate(GenerateSpec{c, 12, 3, 19});
    // Remove mass from a point of the line y = 0, where the conic factor 1 + y + x^2 is positive.
    AtomicMeasure neg;
    MomentSequence L = g.moments;
    for (double m = 0.5; m < 1e9; m *= 2.0) {
        neg.atoms = {{0.4, 0.0, m, 0}};
        L = g.moments;
        const MomentSequence D = generate(neg, c, 3);
        for (auto& [e, v] : L.beta) v -= D.beta.at(e);
        const Decision d = decide(L);
        if (d.verdict == Verdict::NotMomentFunctional) break;
    }
    const Decision d = decide(L);
    ASSERT_EQ(d.verdict, Verdict::NotMomentFunctional);
    const Witness w = witness(L);
    EXPECT_GE(w.min_sampled, -1e-8);
    EXPECT_LT(w.value, -1e-10 * L.scale());
}

TEST(Witness, PassingDataHasNone) {
    const Generated g = generate(GenerateSpec{make_case(CaseId::P4, {}), 6, 2, 1});
    EXPECT_THROW(witness(g.moments), NoWitness);
}

TEST(Witness, SoundOnEveryCase) {
    for (const auto& nc : fixtures::all_named_cases()) {
        const int k = std::max(2, k_min(nc.curve.id));
        const Generated g = generate(GenerateSpec{nc.curve, 3 * k, k, 61});
        const MomentSequence L = push_out(g, nc.curve);
        const Decision d = decide(L);
        ASSERT_TRUE(d.witness_available) << nc.name << ": " << d.branch;
        const Witness w = witness(L);
        EXPECT_GE(w.min_sampled, -1e-8) << nc.name;
        EXPECT_LT(w.value, -1e-10 * L.scale()) << nc.name;
    }
}
