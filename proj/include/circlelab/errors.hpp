#pragma once

#include <stdexcept>

namespace circlelab {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CIRCLELAB_ERROR(Name)                    \
    struct Name : DomainError {                  \
        using DomainError::DomainError;          \
    }

CIRCLELAB_ERROR(DegenerateTriple);
CIRCLELAB_ERROR(IdentityMap);
CIRCLELAB_ERROR(WrongClass);
CIRCLELAB_ERROR(BadBranch);
CIRCLELAB_ERROR(UniverseMismatch);
CIRCLELAB_ERROR(Undecidable);
CIRCLELAB_ERROR(BadWord);
CIRCLELAB_ERROR(Indeterminate);
CIRCLELAB_ERROR(WrongInput);
CIRCLELAB_ERROR(SupplyError);
CIRCLELAB_ERROR(DegenerateCoincidence);
CIRCLELAB_ERROR(NotElementary);
CIRCLELAB_ERROR(CannotAmplify);
CIRCLELAB_ERROR(BadRho);
CIRCLELAB_ERROR(DependentParameters);
CIRCLELAB_ERROR(BasisFailure);
CIRCLELAB_ERROR(PrecisionUnreachable);
CIRCLELAB_ERROR(TraceInvalid);

#undef CIRCLELAB_ERROR

}  // namespace circlelab
