#pragma once

#include <stdexcept>
#include <string>

namespace tmp3 {

// All library failures derive from std::runtime_error so callers can catch broadly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define TMP3_ERROR(Name)                               \
    struct Name : Error {                              \
        explicit Name(const std::string& what)         \
            : Error(std::string(#Name ": ") + what) {} \
    }

TMP3_ERROR(InvalidParams);
TMP3_ERROR(PoleError);
TMP3_ERROR(UnsupportedCase);
TMP3_ERROR(DegenerateInput);
TMP3_ERROR(NotApplicable);
TMP3_ERROR(MultipleUnknowns);
TMP3_ERROR(IdealViolation);
TMP3_ERROR(ExtractionFailed);
TMP3_ERROR(NoWitness);
TMP3_ERROR(ShapeMismatch);
TMP3_ERROR(NotPsd);
TMP3_ERROR(NoMeasure);
TMP3_ERROR(MalformedInput);

#undef TMP3_ERROR

struct KTooSmall : Error {
    int k_min;
    KTooSmall(int k, int kmin)
        : Error("KTooSmall: k=" + std::to_string(k) + " below minimum " + std::to_string(kmin)),
          k_min(kmin) {}
};

}  // namespace tmp3
