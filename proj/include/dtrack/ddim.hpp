#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dtrack/denoiser.hpp"
#include "dtrack/proposals.hpp"
#include "dtrack/schedule.hpp"

namespace dtrack {

/// Evenly spaced descending ladder t_0 = start, ..., t_steps = 0.
inline std::vector<int> ddim_ladder(int start, int steps) {
  if (steps < 1) throw std::invalid_argument("ddim_ladder: steps must be >= 1");
  std::vector<int> ladder;
  ladder.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    ladder.push_back(static_cast<int>(round_half_up(static_cast<double>(start) * (steps - i) / steps)));
  }
  return ladder;
}

/// Deterministic (eta = 0) DDIM refinement. Every stage asks the denoiser for
/// a clean prediction; intermediate stages re-noise it to the next ladder
/// step using the noise implied by the current sample. The last stage's
/// candidates are returned in pixel space with their proposal indices.
inline std::vector<Candidate> ddim_refine(const ProposalSet& proposals, int steps, const Denoiser& denoiser,
                                          const FrameContext& ctx, const NoiseSchedule& sched,
                                          NoiseForm form = NoiseForm::AsPrinted) {
  if (steps < 1) throw std::invalid_argument("ddim_refine: steps must be >= 1");
  const SignalSpace space = ctx.space();
  const std::vector<int> ladder = ddim_ladder(proposals.timestep, steps);
  std::vector<PairedBox> z = proposals.pairs;
  std::vector<Candidate> pred;
  for (int stage = 0; stage < steps; ++stage) {
    const int t = ladder[static_cast<std::size_t>(stage)];
    pred = denoiser.denoise(z, t, ctx);
    if (pred.size() != z.size()) throw std::runtime_error("ddim_refine: denoiser changed the row count");
    for (auto& c : pred) c.pair = space.clamp(c.pair);
    if (stage + 1 == steps) break;

    const int next = ladder[static_cast<std::size_t>(stage) + 1];
    const double sa_t = std::sqrt(sched.alpha_bar(t));
    const double c_t = sched.noise_coefficient(t, form);
    const double sa_n = std::sqrt(sched.alpha_bar(next));
    const double c_n = sched.noise_coefficient(next, form);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto x0 = pred[i].pair.flatten();
      auto zt = z[i].flatten();
      for (std::size_t k = 0; k < 8; ++k) {
        const double eps = c_t > 1e-12 ? (zt[k] - sa_t * x0[k]) / c_t : 0.0;
        zt[k] = sa_n * x0[k] + c_n * eps;
      }
      z[i] = PairedBox::unflatten(zt);
    }
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i].pair = space.to_pixels(pred[i].pair);
    pred[i].proposal_index = i;
  }
  return pred;
}

}  // namespace dtrack
