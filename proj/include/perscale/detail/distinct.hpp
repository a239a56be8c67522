#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace perscale {

template <typename Redraw>
void enforce_distinct(std::vector<Point>& pts, Redraw&& redraw) {
  for (;;) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pts[a] != pts[b] ? pts[a] < pts[b] : a < b;
    });
    bool clean = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (pts[order[i]] == pts[order[i - 1]]) {
        pts[order[i]] = redraw();
        clean = false;
      }
    }
    if (clean) return;
  }
}

}  // namespace perscale
