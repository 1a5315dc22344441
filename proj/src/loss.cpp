#include "genlearn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "genlearn/error.hpp"

namespace genlearn {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::square: return "square";
    case LossKind::absolute: return "absolute";
    case LossKind::hinge: return "hinge";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "square") return LossKind::square;
  if (name == "absolute") return LossKind::absolute;
  if (name == "hinge") return LossKind::hinge;
  throw invalid_input("unknown loss '" + name + "'");
}

double Interval::pick() const {
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return 0.5 * (lo + hi);
}

double loss_value(const Loss& loss, double y, double t) {
  switch (loss.kind) {
    case LossKind::square: return loss.weight * (t - y) * (t - y);
    case LossKind::absolute: return loss.weight * std::abs(t - y);
    case LossKind::hinge: return loss.weight * std::max(0.0, 1.0 - y * t);
  }
  return 0.0;
}

Interval subgradient(const Loss& loss, double y, double t) {
  const double w = loss.weight;
  switch (loss.kind) {
    case LossKind::square: {
      const double g = 2.0 * w * (t - y);
      return {g, g};
    }
    case LossKind::absolute:
      if (t > y) return {w, w};
      if (t < y) return {-w, -w};
      return {-w, w};
    case LossKind::hinge: {
      const double margin = y * t;
      if (margin > 1.0) return {0.0, 0.0};
      const double g = -w * y;
      if (margin < 1.0) return {g, g};
      return {std::min(g, 0.0), std::max(g, 0.0)};
    }
  }
  return {0.0, 0.0};
}

double prox(const Loss& loss, double y, double v, double step) {
  if (!(step > 0.0)) throw invalid_input("prox: step must be positive");
  const double w = loss.weight;
  switch (loss.kind) {
    case LossKind::square:
      return (v + 2.0 * step * w * y) / (1.0 + 2.0 * step * w);
    case LossKind::absolute: {
      const double r = v - y;
      const double shrunk = std::max(0.0, std::abs(r) - step * w);
      return y + std::copysign(shrunk, r);
    }
    case LossKind::hinge: {
      if (y == 0.0 || y * v >= 1.0) return v;
      // Inside the active region the loss is affine with slope -w y.
      const double moved = v + step * w * y;
      if (y * moved <= 1.0) return moved;
      return 1.0 / y;
    }
  }
  return v;
}

double local_lipschitz(const Loss& loss, double theta, double y_bound) {
  if (!(theta > 0.0)) throw invalid_input("local_lipschitz: theta must be > 0");
  if (y_bound < 0.0) throw invalid_input("local_lipschitz: y_bound must be >= 0");
  const double w = std::abs(loss.weight);
  switch (loss.kind) {
    case LossKind::square: return 2.0 * w * (theta + y_bound);
    case LossKind::absolute: return w;
    // Labels are +-1 in practice; larger |y| scales the slope.
    case LossKind::hinge: return w * std::max(1.0, y_bound);
  }
  return 0.0;
}

MultiLoss::MultiLoss(std::vector<LossBlock> blocks) : blocks_(std::move(blocks)) {
  Eigen::Index expected = 0;
  for (const auto& b : blocks_) {
    if (b.begin != expected || b.end <= b.begin) {
      throw invalid_input("multiloss: blocks must tile the samples contiguously");
    }
    if (!(b.rho > 0.0)) throw invalid_input("multiloss: rho must be positive");
    if (b.weights.size() != b.count() || (b.weights.array() < 0.0).any()) {
      throw invalid_input("multiloss: per-sample weights must be >= 0");
    }
    expected = b.end;
  }
  size_ = expected;
}

double MultiLoss::value(const Eigen::VectorXd& y,
                        const Eigen::VectorXd& t) const {
  if (y.size() != size_ || t.size() != size_) {
    throw invalid_input("multiloss: length mismatch");
  }
  double total = 0.0;
  for (const auto& b : blocks_) {
    double block = 0.0;
    for (Eigen::Index k = b.begin; k < b.end; ++k) {
      block += loss_value({b.kind, b.weights[k - b.begin]}, y[k], t[k]);
    }
    total += b.rho * block / static_cast<double>(b.count());
  }
  return total;
}

Loss MultiLoss::sample_loss(Eigen::Index k) const {
  for (const auto& b : blocks_) {
    if (k >= b.begin && k < b.end) {
      return {b.kind, b.rho * b.weights[k - b.begin] / double(b.count())};
    }
  }
  throw invalid_input("multiloss: sample index out of range");
}

std::vector<Loss> MultiLoss::sample_losses() const {
  std::vector<Loss> out;
  out.reserve(size_);
  for (const auto& b : blocks_) {
    for (Eigen::Index k = b.begin; k < b.end; ++k) {
      out.push_back({b.kind, b.rho * b.weights[k - b.begin] / double(b.count())});
    }
  }
  return out;
}

bool MultiLoss::all_of(LossKind kind) const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [kind](const LossBlock& b) { return b.kind == kind; });
}

}  // namespace genlearn
