#include "tmp3/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tmp3/bases.hpp"
#include "tmp3/curve_algebra.hpp"
#include "tmp3/errors.hpp"

namespace tmp3 {

namespace {

double hankel_scale(const std::vector<double>& m) {
    double s = 1e-300;
    for (double v : m) s = std::max(s, std::abs(v));
    return s;
}

double moment_mismatch(const std::vector<LineAtom>& atoms, const std::vector<double>& m) {
    double worst = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        double s = 0.0;
        for (const auto& a : atoms) s += a.w * std::pow(a.t, static_cast<double>(j));
        worst = std::max(worst, std::abs(s - m[j]));
    }
    return worst;
}

// Gauss quadrature from the Jacobi matrix; J_nn is set to J_{n-1,n-1} so m_{2n+1} is never chosen.
std::vector<LineAtom> jacobi_atoms(const Eigen::MatrixXd& H, const std::vector<double>& m) {
    const int n = static_cast<int>(H.rows()) - 1;
    if (n == 0) return {{0.0, m[0]}};
    Eigen::VectorXd s(n + 1);
    for (int i = 0; i <= n; ++i) s(i) = 1.0 / std::sqrt(H(i, i));
    const Eigen::LLT<Eigen::MatrixXd> llt(s.asDiagonal() * H * s.asDiagonal());
    if (llt.info() != Eigen::Success) throw NoMeasure("Cholesky failed on a pd Hankel matrix");
    const Eigen::MatrixXd Lc = s.cwiseInverse().asDiagonal() * Eigen::MatrixXd(llt.matrixL());
    Eigen::MatrixXd H1(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) H1(i, j) = i + j + 1 <= 2 * n ? m[i + j + 1] : 0.0;
    const auto tri = Lc.triangularView<Eigen::Lower>();
    const Eigen::MatrixXd tmp = tri.solve(H1);
    Eigen::MatrixXd J = tri.solve(tmp.transpose()).transpose();
    J = 0.5 * (J + J.transpose());
    J(n, n) = J(n - 1, n - 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (std::abs(i - j) > 1) J(i, j) = 0.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::vector<LineAtom> out;
    for (int i = 0; i <= n; ++i) {
        const double q = es.eigenvectors()(0, i);
        out.push_back({es.eigenvalues()(i), m[0] * q * q});
    }
    return out;
}

std::vector<LineAtom> flat_atoms(const Eigen::MatrixXd& H, const std::vector<double>& m, int r, const Tolerances& tol) {
    const int n = static_cast<int>(H.rows()) - 1;
    const double scale = hankel_scale(m);
    if (r == 0) {
        if (scale > 1e-300 && std::abs(m[0]) > tol.psd * scale) throw NoMeasure("rank 0 with nonzero mass");
        return {};
    }
    const Eigen::MatrixXd Hr = H.topLeftCorner(r, r);
    if (!is_pd(equilibrate(Hr), tol.pd)) throw NoMeasure("leading block of the Hankel matrix is not pd");
    Eigen::VectorXd rhs(r);
    for (int i = 0; i < r; ++i) rhs(i) = m[r + i];
    Eigen::VectorXd s(r);
    for (int i = 0; i < r; ++i) s(i) = 1.0 / std::sqrt(Hr(i, i));
    const Eigen::VectorXd c = s.asDiagonal() * (s.asDiagonal() * Hr * s.asDiagonal()).ldlt().solve(s.asDiagonal() * rhs);
    // Recursive generation: every later moment follows the same recursion.
    for (int j = 0; j + r <= 2 * n; ++j) {
        double pred = 0.0, mag = std::abs(m[j + r]);
        for (int i = 0; i < r; ++i) {
            pred += c(i) * m[j + i];
            mag += std::abs(c(i) * m[j + i]);
        }
        if (std::abs(pred - m[j + r]) > 1e-6 * std::max(mag, 1e-300))
            throw NoMeasure("Hankel data is not recursively generated");
    }
    std::vector<double> g(r + 1);
    for (int i = 0; i < r; ++i) g[i] = -c(i);
    g[r] = 1.0;
    const std::vector<double> roots = real_roots(UnivarPoly(g));
    if (static_cast<int>(roots.size()) != r) throw NoMeasure("generating polynomial lacks real roots");
    for (int i = 1; i < r; ++i)
        if (roots[i] - roots[i - 1] < 1e-10 * (1.0 + std::abs(roots[i])))
            throw NoMeasure("generating polynomial has a repeated root");

    double tmax = 1.0;
    for (double t : roots) tmax = std::max(tmax, std::abs(t));
    Eigen::MatrixXd V(2 * n + 1, r);
    Eigen::VectorXd b(2 * n + 1);
    for (int j = 0; j <= 2 * n; ++j) {
        const double row = std::pow(tmax, -j);
        for (int i = 0; i < r; ++i) V(j, i) = std::pow(roots[i], j) * row;
        b(j) = m[j] * row;
    }
    const Eigen::VectorXd w = V.colPivHouseholderQr().solve(b);
    std::vector<LineAtom> out;
    for (int i = 0; i < r; ++i) {
        if (w(i) < -1e-9 * std::max(std::abs(m[0]), 1e-300)) throw NoMeasure("negative weight");
        if (w(i) > 0.0) out.push_back({roots[i], w(i)});
    }
    return out;
}

}  // namespace

std::vector<LineAtom> solve_hankel_R(const HankelData& h, const Tolerances& tol) {
    const auto& m = h.moments;
    if (m.empty() || m.size() % 2 == 0) throw NoMeasure("Hankel data needs an odd number of moments");
    const int n = static_cast<int>(m.size() - 1) / 2;
    Eigen::MatrixXd H(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) H(i, j) = m[i + j];
    const Eigen::MatrixXd He = equilibrate(H);
    if (!is_psd(He, tol.psd)) throw NoMeasure("Hankel matrix is not psd");
    std::vector<LineAtom> atoms;
    bool pd = true;
    for (int i = 0; i <= n; ++i) pd = pd && H(i, i) > 0.0;
    if (pd && is_pd(He, tol.pd))
        atoms = jacobi_atoms(H, m);
    else
        atoms = flat_atoms(H, m, numeric_rank(He, tol.rank), tol);
    std::sort(atoms.begin(), atoms.end(), [](const LineAtom& a, const LineAtom& b) { return a.t < b.t; });
    const double scale = hankel_scale(m);
    if (moment_mismatch(atoms, m) > 1e-7 * scale) throw NoMeasure("recovered atoms do not reproduce the moments");
    return atoms;
}

double verify(const AtomicMeasure& mu, const MomentSequence& L) {
    double worst = 0.0;
    for (const auto& [e, beta] : L.beta) {
        double s = 0.0;
        for (const auto& a : mu.atoms) s += a.w * std::pow(a.x, e.i) * std::pow(a.y, e.j);
        worst = std::max(worst, std::abs(s - beta) / (1.0 + std::abs(beta)));
    }
    return worst;
}

MomentSequence generate(const AtomicMeasure& mu, const CurveCase& c, int k) {
    std::map<Exponent, double> beta;
    for (int d = 0; d <= 2 * k; ++d)
        for (int i = 0; i <= d; ++i) {
            double s = 0.0;
            for (const auto& a : mu.atoms) s += a.w * std::pow(a.x, i) * std::pow(a.y, d - i);
            beta[{i, d - i}] = s;
        }
    return MomentSequence::from_map(c, k, std::move(beta));
}

namespace {

// Denominators that must stay away from zero at sampled atoms.
std::vector<BivarPoly> pole_denominators(const CurveCase& c, int k) {
    std::vector<BivarPoly> dens;
    auto take = [&](const RationalElem& e) {
        if (!e.is_polynomial()) dens.push_back(e.den);
    };
    try {
        for (const auto& e : basis_Vk(c, k).elements) take(e.value);
    } catch (const NotApplicable&) {
    }
    if (local_kind(c.id) == LocalKind::Joint) take(vk_delta(c, k).added.value);
    if (!uses_two_factor_form(c.id)) take(multiplier(c).f);
    return dens;
}

}  // namespace

namespace {

bool admissible(const CurvePoint& p, const std::vector<BivarPoly>& dens, const AtomicMeasure& mu) {
    for (const auto& d : dens)
        if (std::abs(d.eval(p.x, p.y)) < 1e-3) return false;
    for (const auto& a : mu.atoms)
        if (std::hypot(a.x - p.x, a.y - p.y) < 1e-3) return false;
    return true;
}

AtomicMeasure draw_measure(const GenerateSpec& spec, const std::vector<BivarPoly>& dens, std::uint64_t seed) {
    AtomicMeasure mu;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> uw(0.5, 1.5);
    std::uint64_t batch_seed = seed;
    for (int round = 0; round < 50 && static_cast<int>(mu.atoms.size()) < spec.n_atoms; ++round) {
        const auto pts = sample_points(spec.curve, 4 * spec.n_atoms + 16, batch_seed++);
        for (const auto& p : pts) {
            if (static_cast<int>(mu.atoms.size()) >= spec.n_atoms) break;
            if (admissible(p, dens, mu)) mu.atoms.push_back({p.x, p.y, uw(rng), p.component});
        }
    }
    if (static_cast<int>(mu.atoms.size()) < spec.n_atoms)
        throw DegenerateInput("could not sample enough atoms on " + spec.curve.describe());
    return mu;
}

// Per-atom rows of the moment form and of the localizing form, up to the atom weight.
struct FeatureMap {
    std::vector<RationalElem> moment, local;
    RationalElem f;

    Eigen::VectorXd eval(const std::vector<RationalElem>& elems, const CurvePoint& p, double factor) const {
        Eigen::VectorXd v(elems.size());
        for (std::size_t i = 0; i < elems.size(); ++i) v(i) = factor * elems[i].eval(p.x, p.y);
        return v;
    }
};

FeatureMap feature_map(const CurveCase& c, int k) {
    FeatureMap m;
    for (const auto& e : basis_Bk(c, k).elements) m.moment.push_back(e.value);
    if (!uses_two_factor_form(c.id)) {
        for (const auto& e : basis_Vk(c, k).elements) m.local.push_back(e.value);
        m.f = multiplier(c).f;
    }
    return m;
}

// Gram-Schmidt state over coordinate-scaled feature vectors.
struct SpanTracker {
    Eigen::VectorXd scale;
    std::vector<Eigen::VectorXd> q;

    double residual(const Eigen::VectorXd& raw) const {
        if (raw.size() == 0) return 1.0;
        Eigen::VectorXd v = raw.cwiseProduct(scale);
        const double n = v.norm();
        if (n == 0.0) return 0.0;
        v /= n;
        for (const auto& e : q) v -= e.dot(v) * e;
        return v.norm();
    }
    void add(const Eigen::VectorXd& raw) {
        if (raw.size() == 0 || static_cast<Eigen::Index>(q.size()) >= raw.size()) return;
        Eigen::VectorXd v = raw.cwiseProduct(scale);
        for (const auto& e : q) v -= e.dot(v) * e;
        if (v.norm() > 1e-12) q.push_back(v / v.norm());
    }
};

// A random pool, then greedy picks far from the span of earlier picks in both forms. Plain
// random atoms at high k nearly always satisfy an extra low-degree relation numerically.
AtomicMeasure draw_spread_measure(const GenerateSpec& spec, const std::vector<BivarPoly>& dens, std::uint64_t seed) {
    const FeatureMap fm = feature_map(spec.curve, spec.k);
    const AtomicMeasure pool_mu = draw_measure({spec.curve, 12 * spec.n_atoms, spec.k, seed, 0.0}, dens, seed);
    std::vector<CurvePoint> pool;
    std::vector<Eigen::VectorXd> fa, fb;
    for (const auto& a : pool_mu.atoms) {
        const CurvePoint p{a.x, a.y, a.component};
        pool.push_back(p);
        fa.push_back(fm.eval(fm.moment, p, 1.0));
        const double fv = fm.local.empty() ? 0.0 : fm.f.eval(p.x, p.y);
        fb.push_back(fm.eval(fm.local, p, std::sqrt(std::max(fv, 0.0))));
    }
    auto tracker = [&](const std::vector<Eigen::VectorXd>& f) {
        SpanTracker t;
        t.scale = Eigen::VectorXd::Zero(f.front().size());
        for (const auto& v : f) t.scale = t.scale.cwiseMax(v.cwiseAbs());
        for (Eigen::Index i = 0; i < t.scale.size(); ++i) t.scale(i) = t.scale(i) > 0.0 ? 1.0 / t.scale(i) : 0.0;
        return t;
    };
    SpanTracker ta = tracker(fa), tb = tracker(fb);
    std::vector<bool> used(pool.size(), false);
    std::mt19937_64 rng(seed ^ 0x51ed2701ULL);
    std::uniform_real_distribution<double> uw(0.5, 1.5);
    AtomicMeasure mu;
    while (static_cast<int>(mu.atoms.size()) < spec.n_atoms) {
        int best = -1;
        double best_score = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i] || !admissible(pool[i], dens, mu)) continue;
            const double score = std::min(ta.residual(fa[i]), tb.residual(fb[i]));
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) throw DegenerateInput("could not sample enough atoms on " + spec.curve.describe());
        used[best] = true;
        ta.add(fa[best]);
        tb.add(fb[best]);
        mu.atoms.push_back({pool[best].x, pool[best].y, uw(rng), pool[best].component});
    }
    return mu;
}

// Smallest equilibrated pd margin over the forms decide inspects; known entries only.
double general_position_margin(const MomentSequence& L) {
    const Assembly as = assemble(L.curve, L.k);
    double m = pd_margin(equilibrate(instantiate(as.moment, L).known()));
    auto take = [&](const FormTemplate& t, const std::vector<int>& idx) {
        SymmetricForm F = instantiate(t, L);
        if (!idx.empty()) F = restrict_form(F, idx);
        m = std::min(m, pd_margin(equilibrate(F.known())));
    };
    switch (as.kind) {
        case LocalKind::Joint: take(as.local, as.v_indices); break;
        case LocalKind::TwoFactor:
            if (as.local1) take(*as.local1, as.quotient1);
            take(*as.local2, as.quotient2);
            break;
        default: take(as.local, {}); break;
    }
    return m;
}

}  // namespace

AtomicMeasure sample_measure(const GenerateSpec& spec) {
    const auto dens = pole_denominators(spec.curve, spec.k);
    const int dim = 3 * spec.k;
    if (spec.general_position <= 0.0 || spec.n_atoms < dim) return draw_measure(spec, dens, spec.seed);
    // Redraw until every form is pd with room to spare: random atoms that nearly satisfy an
    // extra relation of degree k give margins far below the pd tolerance.
    for (int attempt = 0; attempt < 400; ++attempt) {
        AtomicMeasure mu = draw_spread_measure(spec, dens, spec.seed + 0x10001ULL * attempt);
        if (general_position_margin(generate(mu, spec.curve, spec.k)) >= spec.general_position) return mu;
    }
    throw DegenerateInput("could not place " + std::to_string(spec.n_atoms) + " atoms in general position on " +
                          spec.curve.describe());
}

Generated generate(const GenerateSpec& spec) {
    Generated g;
    g.measure = sample_measure(spec);
    g.moments = generate(g.measure, spec.curve, spec.k);
    return g;
}

// ---------------------------------------------------------------------------

Extraction extract(const MomentSequence& L, const ExtractOptions& opts) {
    const CaseId id = L.curve.id;
    if (!is_constructive(id)) throw UnsupportedCase("no measure extraction for " + to_string(id));
    double lambda = opts.lambda;
    if (opts.run_decide) {
        DecideOptions dopt;
        dopt.tol = opts.tol;
        const Decision d = decide(L, dopt);
        if (d.verdict != Verdict::MomentFunctional && d.verdict != Verdict::MomentFunctionalOnNonIsolated)
            throw ExtractionFailed("decision is " + to_string(d.verdict) + "; nothing to extract");
        lambda = d.lambda;
    }
    const Assembly as = assemble(L.curve, L.k);
    SymmetricForm U = instantiate(as.local, L);
    const UnivariateLift lift = make_lift(L.curve, L.k);
    const int n = as.bk.size();
    if (id == CaseId::P5 && lambda != 0.0) {
        U.entries(0, 0) -= lambda;  // the constant 1 is the only B_k element not vanishing at O
        U.entries(n, n) += lambda;  // (y/x)^2 = x - 1 takes the value -1 at O
    }
    const Interval I = completion_interval(U, CompletionMode::Psd, opts.tol);
    if (I.empty) throw ExtractionFailed("joint form has no psd completion");

    std::vector<double> candidates;
    switch (opts.choice) {
        case CompletionChoice::Midpoint: candidates.push_back(I.midpoint()); break;
        case CompletionChoice::Left: candidates.push_back(I.lo); break;
        case CompletionChoice::Right: candidates.push_back(I.hi); break;
        case CompletionChoice::Value:
            if (!I.contains(opts.value)) throw ExtractionFailed("requested completion value lies outside the psd interval");
            candidates.push_back(opts.value);
            break;
    }
    for (double s : {0.25, 0.75, 0.125, 0.375, 0.625, 0.875, 0.0625, 0.9375}) candidates.push_back(I.at(s));

    const ParamComponent& pc = lift.component;
    std::string last_reason = "no candidate tried";
    int attempts = 0;
    for (double v : candidates) {
        ++attempts;
        try {
            const Eigen::MatrixXd H = lift_hankel(lift, U.with_value(v).entries);
            const auto line = solve_hankel_R({hankel_moments(H)}, opts.tol);
            AtomicMeasure mu;
            bool admissible = true;
            for (const auto& a : line) {
                for (double ex : pc.excluded)
                    if (std::abs(a.t - ex) < 1e-6) admissible = false;
                if (!admissible) break;
                const double wt = lift.weight.eval(a.t);
                mu.atoms.push_back({pc.x(a.t), pc.y(a.t), a.w * wt * wt, 0});
            }
            if (!admissible) {
                last_reason = "atom at an excluded parameter";
                continue;
            }
            if (id == CaseId::P5 && lambda > 1e-14 * L.scale()) mu.atoms.push_back({0.0, 0.0, lambda, 1});
            const double res = verify(mu, L);
            if (res >= 1e-6) {
                last_reason = "moment residual " + std::to_string(res);
                continue;
            }
            return {std::move(mu), v, res, attempts};
        } catch (const NoMeasure& e) {
            last_reason = e.what();
        } catch (const PoleError& e) {
            last_reason = e.what();
        }
    }
    throw ExtractionFailed("no completion point yields an admissible measure (" + last_reason + ")");
}

// ---------------------------------------------------------------------------

Witness witness(const MomentSequence& L, const DecideOptions& opts) {
    const Decision d = decide(L, opts);
    if (d.verdict != Verdict::NotMomentFunctional || !d.witness_available)
        throw NoWitness("decision does not expose a failed psd check (" + to_string(d.verdict) + ")");
    const Assembly as = assemble(L.curve, L.k);
    const FormTemplate* T = nullptr;
    std::vector<int> idx;
    switch (d.failed) {
        case FailedForm::Moment: T = &as.moment; break;
        case FailedForm::Local:
            T = &as.local;
            if (as.kind == LocalKind::Joint) idx = as.v_indices;
            break;
        case FailedForm::Local1: T = &*as.local1; break;
        case FailedForm::Local2: T = &*as.local2; break;
        default: throw NoWitness("failed form has no separating polynomial");
    }
    if (idx.empty())
        for (int i = 0; i < T->size(); ++i) idx.push_back(i);
    const Eigen::MatrixXd F = restrict_form(instantiate(*T, L), idx).known();

    Eigen::VectorXd s(F.rows());
    for (int i = 0; i < F.rows(); ++i) s(i) = F(i, i) > 0.0 ? 1.0 / std::sqrt(F(i, i)) : 1.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.asDiagonal() * F * s.asDiagonal());
    const Eigen::VectorXd g = s.asDiagonal() * es.eigenvectors().col(0);

    Witness w;
    w.source = d.failed;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) w.p += *T->cell(idx[a], idx[b]) * (g(a) * g(b));
    w.p = w.p.pruned(1e-15);
    w.value = L.apply(w.p);
    w.min_sampled = std::numeric_limits<double>::infinity();
    for (const auto& q : sample_points(L.curve, 500, 0x5eedULL)) w.min_sampled = std::min(w.min_sampled, w.p.eval(q.x, q.y));
    return w;
}

}  // namespace tmp3
