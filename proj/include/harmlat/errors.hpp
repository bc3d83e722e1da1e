#pragma once

#include <stdexcept>
#include <string>

namespace harmlat {

// Every numerical failure carries a stable name; the CLI prints it on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define HARMLAT_DEFINE_ERROR(Name)                                              \
    struct Name : Error {                                                       \
        explicit Name(const std::string& message) : Error(#Name, message) {}    \
    };

// core_symplectic
HARMLAT_DEFINE_ERROR(NotPositiveSemidefinite)
HARMLAT_DEFINE_ERROR(PairingFailure)
HARMLAT_DEFINE_ERROR(IrrelevantModes)
HARMLAT_DEFINE_ERROR(NotSimultaneouslyDiagonalizable)
HARMLAT_DEFINE_ERROR(SingularSpectralMatrix)
HARMLAT_DEFINE_ERROR(DimensionMismatch)

// lattice_model / correlations
HARMLAT_DEFINE_ERROR(OutOfRange)
HARMLAT_DEFINE_ERROR(NonSummable)
HARMLAT_DEFINE_ERROR(InvalidStencil)
HARMLAT_DEFINE_ERROR(NegativeSymbol)
HARMLAT_DEFINE_ERROR(DivergentBlock)
HARMLAT_DEFINE_ERROR(ImaginaryResidue)
HARMLAT_DEFINE_ERROR(GridTooLarge)

// asymptotics
HARMLAT_DEFINE_ERROR(CriticalInput)
HARMLAT_DEFINE_ERROR(EmptyInterior)
HARMLAT_DEFINE_ERROR(FlatBand)
HARMLAT_DEFINE_ERROR(InsufficientData)
HARMLAT_DEFINE_ERROR(ZeroCrossingInWindow)

// gmps
HARMLAT_DEFINE_ERROR(SingularDenominator)
HARMLAT_DEFINE_ERROR(SingularCollapse)
HARMLAT_DEFINE_ERROR(SingularAtPhi)
HARMLAT_DEFINE_ERROR(RankDeficientSampling)
HARMLAT_DEFINE_ERROR(PurityViolation)
HARMLAT_DEFINE_ERROR(CriticalDenominator)

// trotter_sim
HARMLAT_DEFINE_ERROR(NotCirculant)
HARMLAT_DEFINE_ERROR(NotUniversalGateSet)

struct BudgetExceeded : Error {
    BudgetExceeded(const std::string& message, double best)
        : Error("BudgetExceeded", message), bestError(best) {}
    double bestError;
};

#undef HARMLAT_DEFINE_ERROR

}  // namespace harmlat
