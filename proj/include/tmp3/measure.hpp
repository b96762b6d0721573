#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmp3/curves.hpp"
#include "tmp3/linalg.hpp"
#include "tmp3/moment.hpp"
#include "tmp3/poly.hpp"

namespace tmp3 {

struct Atom {
    double x = 0.0, y = 0.0, w = 0.0;
    int component = 0;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;
};

// Power moments m_0 ... m_{2n} of a measure on the real line.
struct HankelData {
    std::vector<double> moments;
};

struct LineAtom {
    double t = 0.0, w = 0.0;
};

// Atoms on R matching m_0..m_{2n} (n+1 atoms when the Hankel matrix is pd, rank-many
// when it is flat). Throws NoMeasure otherwise.
std::vector<LineAtom> solve_hankel_R(const HankelData& h, const Tolerances& tol = {});

enum class CompletionChoice { Midpoint, Left, Right, Value };

struct ExtractOptions {
    CompletionChoice choice = CompletionChoice::Midpoint;
    double value = 0.0;  // used with CompletionChoice::Value
    Tolerances tol;
    bool run_decide = true;  // false when the caller already settled the decision
    double lambda = 0.0;     // P5 mass at the isolated point, used when run_decide is false
};

struct Extraction {
    AtomicMeasure measure;
    double completion_value = 0.0;
    double residual = 0.0;
    int attempts = 0;
};

// Constructive cases only (P3, P4, P5, P6, P12, P13).
Extraction extract(const MomentSequence& L, const ExtractOptions& opts = {});

// Max over i+j <= 2k of |sum w x^i y^j - beta_ij| / (1 + |beta_ij|).
double verify(const AtomicMeasure& mu, const MomentSequence& L);

MomentSequence generate(const AtomicMeasure& mu, const CurveCase& c, int k);

struct GenerateSpec {
    CurveCase curve;
    int n_atoms = 1;
    int k = 1;
    std::uint64_t seed = 0;
    // With at least 3k atoms, redraw until every form decide inspects has an equilibrated
    // pd margin of at least this much. 0 disables the check.
    double general_position = 1e-7;
};

// Atoms sampled on the curve away from basis poles, weights in [0.5, 1.5].
AtomicMeasure sample_measure(const GenerateSpec& spec);

struct Generated {
    AtomicMeasure measure;
    MomentSequence moments;
};
Generated generate(const GenerateSpec& spec);

struct Witness {
    BivarPoly p;
    double value = 0.0;        // L(p)
    double min_sampled = 0.0;  // min of p over sampled curve points
    FailedForm source = FailedForm::None;
};

// p >= 0 on the curve with L(p) < 0; throws NoWitness when the decision does not refute L.
Witness witness(const MomentSequence& L, const DecideOptions& opts = {});

}  // namespace tmp3
