#ifndef ADSSM_GRADCHECK_HPP
#define ADSSM_GRADCHECK_HPP

#include <cstdint>
#include <map>
#include <string>

#include "adssm/model.hpp"

namespace adssm::model {

struct GradCheckResult {
    std::map<std::string, double> group_max_rel_err;  // per tensor
    double max_rel_err = 0.0;
};

// Central finite differences (step 1e-4) against the tape gradients on a
// tiny random instance. Relative error per scalar uses
// |a - f| / max(1e-6, |a|, |f|).
GradCheckResult gradient_check(std::uint64_t seed, const Dims& dims = Dims::tiny(),
                               std::int64_t steps = 3, double fd_step = 1e-4,
                               double beta = 0.7);

}  // namespace adssm::model

#endif
