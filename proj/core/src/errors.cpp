#include "evac/errors.hpp"

namespace evac {

PowerFlowError::PowerFlowError(const std::string& what, int t, double mismatch)
    : Error(what), t_(t), mismatch_(mismatch) {}

}  // namespace evac
