#pragma once

#include <string>
#include <vector>

#include "tmp3/curves.hpp"
#include "tmp3/poly.hpp"

namespace tmp3 {

struct BasisElement {
    enum class Kind { Monomial, Rational, Composite };
    Kind kind = Kind::Monomial;
    std::string label;
    RationalElem value;
};

enum class BasisSpace { Bk, Vk, Rk1 };

struct Basis {
    CurveCase curve;
    int k = 1;
    BasisSpace space = BasisSpace::Bk;
    std::vector<BasisElement> elements;
    // P10/P11: the Riemann-Roch element of V^(k) is not constructed, so only 3k-1
    // elements are present.
    bool partial = false;

    std::size_t size() const { return elements.size(); }
    int index_of(const std::string& label) const;  // -1 when absent
    std::vector<std::string> labels() const;
};

int k_min(CaseId id);

Basis basis_Bk(const CurveCase& c, int k);
// Throws NotApplicable for P15, P19, P24, whose certificate uses basis_Rk1 instead.
Basis basis_Vk(const CurveCase& c, int k);
Basis basis_Rk1(const CurveCase& c, int k);

// Where V^(k) differs from B_k: the position of the dropped B_k element and the
// element V^(k) adds. Used to assemble the joint form over B_k plus the new element.
struct VkDelta {
    int dropped = -1;
    BasisElement added;
};
VkDelta vk_delta(const CurveCase& c, int k);

}  // namespace tmp3
