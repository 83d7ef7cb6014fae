#include "thor/inference.hpp"

#include <algorithm>

#include "thor/errors.hpp"

namespace thor {

std::vector<ActivationMap> modulate(std::span<const ActivationMap> maps) {
  std::vector<ActivationMap> out(maps.begin(), maps.end());
  if (maps.empty()) return out;
  const int h = maps[0].height();
  const int w = maps[0].width();
  for (const auto& m : maps) {
    if (m.height() != h || m.width() != w) throw DimensionError("modulate: activation maps differ in size");
  }
  const std::size_t cells = static_cast<std::size_t>(h) * w;

  std::vector<double> shift(maps.size());
  std::vector<double> weight(maps.size());
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    shift[i] = maps[i].min();
    weight[i] = maps[i].peak().value - shift[i];
    weight_sum += weight[i];
  }
  if (!(weight_sum > 0.0)) return out;

  std::vector<double> avg(cells, 0.0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (weight[i] == 0.0) continue;
    const auto s = maps[i].scores();
    for (std::size_t k = 0; k < cells; ++k) avg[k] += weight[i] * (s[k] - shift[i]);
  }
  for (double& v : avg) v /= weight_sum;

  std::vector<double> product(cells);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const double target = weight[i];
    if (target == 0.0) continue;  // constant map: nothing to reshape
    const auto s = maps[i].scores();
    double pmax = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      product[k] = (s[k] - shift[i]) * avg[k];
      pmax = std::max(pmax, product[k]);
    }
    auto dst = out[i].scores();
    if (!(pmax > 0.0)) continue;
    const double factor = target / pmax;
    for (std::size_t k = 0; k < cells; ++k) {
      const double v = product[k] == pmax ? target : std::min(product[k] * factor, target);
      dst[k] = v + shift[i];
    }
  }
  return out;
}

Prediction best_prediction(std::span<const ActivationMap> maps, const SearchGeometry& geometry) {
  if (maps.empty()) throw ParameterError("best_prediction: no activation maps");
  Prediction best;
  double best_adjusted = 0.0;
  bool have = false;
  for (const auto& m : maps) {
    const LocatedPeak p = locate_peak(m, geometry);
    const bool better = !have || p.adjusted > best_adjusted ||
                        (p.adjusted == best_adjusted && m.template_id() < best.template_id);
    if (better) {
      best = Prediction{p.box, p.score, m.template_id(), m.scale_index()};
      best_adjusted = p.adjusted;
      have = true;
    }
  }
  return best;
}

std::string to_string(Source s) { return s == Source::kShortTerm ? "ST" : "LT"; }

SwitchResult st_lt_switch(const Prediction& st, const Prediction& lt, double th_iou) {
  if (!(th_iou >= 0.0 && th_iou <= 1.0)) throw ParameterError("th_iou must lie in [0, 1]");
  if (iou(st.box, lt.box) >= th_iou) return {Source::kShortTerm, false};
  return {Source::kLongTerm, true};
}

}  // namespace thor
