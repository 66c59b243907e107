#pragma once

#include <functional>
#include <string>
#include <vector>

#include "steipcn/core.hpp"

namespace steipcn {

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0;
    int64_t elements = 0;
    int64_t refined = 0;  // elements re-checked at smaller steps (kink within +-h)
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    double max_rel_err = 0;
    int64_t refined = 0;
    bool pass(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of every element of every registered parameter.
// make_loss must rebuild the forward pass from current parameter values on
// the given tape and return a scalar loss; it is evaluated twice per element
// plus once for the reverse-mode gradients.
// Relative error: |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|).
// Elements whose error exceeds refine_threshold at the primary step are
// re-estimated at fd_step/{10,100} and fd_step*{10,100}: a kink (ReLU, |.|)
// inside the +-h interval invalidates the difference quotient and needs a
// smaller step, while gradients near the 1e-8 denominator floor drown in
// (f+ - f-) roundoff and need a larger one. The reverse-mode value under
// test never changes.
GradCheckReport check_gradients(ParamRegistry<double>& params,
                                const std::function<Tensor<double>(Tape<double>&)>& make_loss,
                                double fd_step = 1e-5, double refine_threshold = 1e-4);

}  // namespace steipcn
