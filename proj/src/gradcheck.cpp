#include "steipcn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace steipcn {

GradCheckReport check_gradients(ParamRegistry<double>& params,
                                const std::function<Tensor<double>(Tape<double>&)>& make_loss,
                                double fd_step, double refine_threshold) {
    params.zero_grads();
    {
        Tape<double> tape;
        auto loss = make_loss(tape);
        tape.backward(loss);
    }
    // Snapshot reverse-mode gradients before finite differences disturb state.
    std::vector<std::vector<double>> ad_grads;
    ad_grads.reserve(params.count());
    for (const auto& [_, p] : params.items()) ad_grads.push_back(p->g);

    auto eval_loss = [&make_loss]() {
        Tape<double> tape;
        return make_loss(tape)->v[0];
    };
    auto rel_err = [](double g_ad, double g_fd) {
        return std::abs(g_ad - g_fd) / std::max(1e-8, std::abs(g_ad) + std::abs(g_fd));
    };

    GradCheckReport report;
    size_t gi = 0;
    for (const auto& [name, p] : params.items()) {
        GradCheckGroup group{name, 0.0, p->size(), 0};
        for (int64_t i = 0; i < p->size(); ++i) {
            const double saved = p->v[i];
            const double g_ad = ad_grads[gi][i];
            // Primary step first; on failure walk down (kink inside +-h) and
            // up (difference quotient roundoff-limited for tiny gradients).
            const double steps[] = {fd_step, fd_step / 10, fd_step / 100, fd_step * 10, fd_step * 100};
            double best = 0;
            for (int attempt = 0; attempt < 5; ++attempt) {
                const double h = steps[attempt];
                p->v[i] = saved + h;
                const double f_plus = eval_loss();
                p->v[i] = saved - h;
                const double f_minus = eval_loss();
                p->v[i] = saved;
                const double err = rel_err(g_ad, (f_plus - f_minus) / (2.0 * h));
                best = attempt == 0 ? err : std::min(best, err);
                if (best < refine_threshold) break;
                if (attempt == 0) ++group.refined;
            }
            group.max_rel_err = std::max(group.max_rel_err, best);
        }
        report.max_rel_err = std::max(report.max_rel_err, group.max_rel_err);
        report.refined += group.refined;
        report.groups.push_back(std::move(group));
        ++gi;
    }
    return report;
}

}  // namespace steipcn
