#include "semscene/optim.hpp"

#include <cmath>

#include "semscene/errors.hpp"

namespace semscene {

const ParamLayout::Block& ParamLayout::find(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw ConfigError("unknown parameter block '" + name + "'");
}

Adam::Adam(size_t n, AdamConfig cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void Adam::update(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ShapeError("Adam update size mismatch");
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    double mhat = m_[i] / bc1;
    double vhat = v_[i] / bc2;
    if (cfg_.weight_decay != 0.0) params[i] -= cfg_.lr * cfg_.weight_decay * params[i];
    params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
}

void sgd_update(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != grad.size()) throw ShapeError("sgd update size mismatch");
  for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

}  // namespace semscene
