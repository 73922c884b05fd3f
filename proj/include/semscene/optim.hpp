#pragma once

#include <span>
#include <string>
#include <vector>

namespace semscene {

/// Named slices of a flat parameter vector; fixes serialization order.
struct ParamLayout {
  struct Block {
    std::string name;
    size_t offset = 0;
    size_t count = 0;
  };
  std::vector<Block> blocks;
  size_t total = 0;

  size_t add(const std::string& name, size_t count) {
    blocks.push_back({name, total, count});
    total += count;
    return blocks.back().offset;
  }
  const Block& find(const std::string& name) const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

class Adam {
 public:
  Adam(size_t n, AdamConfig cfg);
  void update(std::span<double> params, std::span<const double> grad);
  long step_count() const { return step_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  long step_ = 0;
};

/// Plain gradient-descent step (fallback optimizer).
void sgd_update(std::span<double> params, std::span<const double> grad, double lr);

}  // namespace semscene
