#include "earlywarn/numkit/adam.hpp"

#include <cmath>

namespace earlywarn::numkit {

template <class T>
void adam_step(std::span<Param<T>* const> params, AdamState<T>& state) {
  if (state.first_moment.empty()) {
    for (const Param<T>* p : params) {
      state.first_moment.emplace_back(p->size(), T(0));
      state.second_moment.emplace_back(p->size(), T(0));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter list changed between steps");
  }
  ++state.step_count;
  const auto& cfg = state.config;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<T>& p = *params[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (m.size() != p.size()) throw Error(ErrorCode::ShapeMismatch, "adam_step: " + p.name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = static_cast<T>(cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g);
      v[i] = static_cast<T>(cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g);
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] = static_cast<T>(p.value[i] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
    }
  }
}

template void adam_step(std::span<Param<float>* const>, AdamState<float>&);
template void adam_step(std::span<Param<double>* const>, AdamState<double>&);

}  // namespace earlywarn::numkit
