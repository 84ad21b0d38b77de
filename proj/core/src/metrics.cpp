/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "orvos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "orvos/errors.hpp"

namespace orvos {

namespace {

void check_shapes(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (a.height != b.height || a.width != b.width || a.cells.size() != b.cells.size()) {
    throw ShapeError(std::string(what) + ": mask shapes differ (" + std::to_string(a.height) + "x" +
                     std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
  }
}

struct Offset {
  long dy;
  long dx;
};

std::vector<Offset> disk(double radius) {
  const long r = static_cast<long>(std::floor(radius));
  std::vector<Offset> out;
  for (long dy = -r; dy <= r; ++dy) {
    for (long dx = -r; dx <= r; ++dx) {
      if (static_cast<double>(dy * dy + dx * dx) <= radius * radius) out.push_back({dy, dx});
    }
  }
  return out;
}

/// Fraction of `from` boundary cells with a `to` boundary cell inside the disk.
double matched_fraction(const BinaryMask& from, const BinaryMask& to, const std::vector<Offset>& offsets) {
  std::size_t total = 0, hit = 0;
  const long h = static_cast<long>(from.height), w = static_cast<long>(from.width);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      if (!from.at(y, x)) continue;
      ++total;
      for (const Offset& o : offsets) {
        const long yy = y + o.dy, xx = x + o.dx;
        if (yy >= 0 && yy < h && xx >= 0 && xx < w && to.at(yy, xx)) {
          ++hit;
          break;
        }
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

struct Accumulator {
  double j = 0.0, f = 0.0;
  std::size_t n = 0;
  void add(double jj, double ff) {
    j += jj;
    f += ff;
    ++n;
  }
  Score mean() const {
    Score s;
    s.queries = n;
    if (n == 0) return s;
    s.j = j / static_cast<double>(n);
    s.f = f / static_cast<double>(n);
    s.jf = 0.5 * (s.j + s.f);
    return s;
  }
};

/// Masks predicted for (video, query), checked against the ground truth layout.
const std::vector<BinaryMask>& lookup(const PredictionSet& preds, const AnnotatedSample& s, const AnnotatedQuery& q) {
  const std::string where = "video '" + s.video_id + "' query '" + q.spec.query_id + "'";
  auto v = preds.find(s.video_id);
  if (v == preds.end()) throw CoverageError("no predictions for video '" + s.video_id + "'");
  auto it = v->second.queries.find(q.spec.query_id);
  if (it == v->second.queries.end()) throw CoverageError("no predictions for " + where);
  if (it->second.size() != q.masks.size()) {
    throw CoverageError(where + ": " + std::to_string(it->second.size()) + " predicted frames, expected " +
                        std::to_string(q.masks.size()));
  }
  for (std::size_t t = 0; t < q.masks.size(); ++t) {
    const BinaryMask& p = it->second[t];
    if (p.height != q.masks[t].height || p.width != q.masks[t].width) {
      throw CoverageError(where + " frame " + std::to_string(t + 1) + ": prediction geometry differs");
    }
  }
  return it->second;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double region_similarity(const BinaryMask& pred, const BinaryMask& gt) {
  check_shapes(pred, gt, "region_similarity");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.cells.size(); ++i) {
    inter += pred.cells[i] && gt.cells[i];
    uni += pred.cells[i] || gt.cells[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask boundary_cells(const BinaryMask& m) {
  BinaryMask out(m.height, m.width);
  const std::size_t h = m.height, w = m.width;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!m.at(y, x)) continue;
      const bool edge = y == 0 || x == 0 || y + 1 == h || x + 1 == w || !m.at(y - 1, x) || !m.at(y + 1, x) ||
                        !m.at(y, x - 1) || !m.at(y, x + 1);
      out.at(y, x) = edge ? 1 : 0;
    }
  }
  return out;
}

double default_boundary_radius(std::size_t height, std::size_t width) {
  const double diag = std::sqrt(static_cast<double>(height * height + width * width));
  return std::ceil(0.008 * diag);
}

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double radius) {
  check_shapes(pred, gt, "boundary_f");
  if (!(radius >= 0.0)) throw InvalidArgument("boundary_f: radius must be non-negative");
  const bool pe = pred.none(), ge = gt.none();
  if (pe && ge) return 1.0;
  if (pe || ge) return 0.0;
  const BinaryMask bp = boundary_cells(pred), bg = boundary_cells(gt);
  const std::vector<Offset> offsets = disk(radius);
  const double precision = matched_fraction(bp, bg, offsets);
  const double recall = matched_fraction(bg, bp, offsets);
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

MetricReport score_corpus(const Corpus& corpus, const PredictionSet& predictions) {
  MetricReport report;
  std::array<Accumulator, 5> per_cat;
  Accumulator overall;
  for (const auto& s : corpus) {
    const double radius = default_boundary_radius(s.height, s.width);
    for (const auto& q : s.queries) {
      const auto& preds = lookup(predictions, s, q);
      Accumulator frames;
      for (std::size_t t = 0; t < q.masks.size(); ++t) {
        frames.add(region_similarity(preds[t], q.masks[t]), boundary_f(preds[t], q.masks[t], radius));
      }
      const Score m = frames.mean();
      report.queries.push_back({s.video_id, q.spec.query_id, q.spec.category, m.j, m.f, m.jf});
      per_cat[static_cast<std::size_t>(q.spec.category)].add(m.j, m.f);
      overall.add(m.j, m.f);
    }
  }
  for (std::size_t c = 0; c < 5; ++c) report.categories[c] = per_cat[c].mean();
  report.overall = overall.mean();
  return report;
}

ShiftWindowReport shift_window_report(const Corpus& corpus, const PredictionSet& predictions, std::size_t window) {
  ShiftWindowReport out;
  out.window = window;
  Accumulator near, far;
  for (const auto& s : corpus) {
    const double radius = default_boundary_radius(s.height, s.width);
    for (const auto& q : s.queries) {
      const auto& preds = lookup(predictions, s, q);
      std::vector<bool> is_near(q.masks.size(), false);
      for (const auto& r : q.shifts) {
        for (std::size_t edge : {r.start_frame, r.end_frame}) {
          const std::size_t lo = edge > window ? edge - window : 1;
          const std::size_t hi = std::min(q.masks.size(), edge + window);
          for (std::size_t t = lo; t <= hi; ++t) is_near[t - 1] = true;
        }
      }
      Accumulator qn, qf;
      for (std::size_t t = 0; t < q.masks.size(); ++t) {
        const double j = region_similarity(preds[t], q.masks[t]);
        const double f = boundary_f(preds[t], q.masks[t], radius);
        (is_near[t] ? qn : qf).add(j, f);
      }
      out.boundary_frames += qn.n;
      out.off_boundary_frames += qf.n;
      if (qn.n) near.add(qn.mean().j, qn.mean().f);
      if (qf.n) far.add(qf.mean().j, qf.mean().f);
    }
  }
  out.boundary = near.mean();
  out.off_boundary = far.mean();
  return out;
}

std::string report_csv(const MetricReport& r, bool per_category, const ShiftWindowReport* shifts) {
  std::string out = "scope,category,J,F,JF\n";
  auto row = [&](const std::string& scope, std::string_view cat, const Score& s) {
    out += scope + "," + std::string(cat) + "," + fmt(s.j) + "," + fmt(s.f) + "," + fmt(s.jf) + "\n";
  };
  row("overall", "all", r.overall);
  if (per_category) {
    for (Category c : kAllCategories) {
      const Score& s = r.categories[static_cast<std::size_t>(c)];
      if (s.queries > 0) row("category", to_string(c), s);
    }
  }
  if (shifts) {
    row("shift_window_" + std::to_string(shifts->window), "boundary", shifts->boundary);
    row("shift_window_" + std::to_string(shifts->window), "off_boundary", shifts->off_boundary);
  }
  return out;
}

std::string category_table_csv(const MetricReport& r) {
  std::string out = "metric";
  for (Category c : kAllCategories) out += "," + std::string(display_name(c));
  out += ",Overall\n";
  auto cell = [](const Score& s, double v) { return s.queries ? fmt(v) : std::string(); };
  const char* names[] = {"J", "F", "JF"};
  for (int k = 0; k < 3; ++k) {
    out += names[k];
    for (const Score& s : r.categories) out += "," + cell(s, k == 0 ? s.j : k == 1 ? s.f : s.jf);
    const Score& o = r.overall;
    out += "," + cell(o, k == 0 ? o.j : k == 1 ? o.f : o.jf) + "\n";
  }
  return out;
}

std::string category_table_line(const MetricReport& r) {
  std::string out;
  char buf[64];
  for (Category c : kAllCategories) {
    const Score& s = r.categories[static_cast<std::size_t>(c)];
    if (s.queries) {
      std::snprintf(buf, sizeof buf, "%s %.1f  ", std::string(display_name(c)).c_str(), 100.0 * s.jf);
    } else {
      std::snprintf(buf, sizeof buf, "%s -  ", std::string(display_name(c)).c_str());
    }
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "| J %.1f  F %.1f  J&F %.1f", 100.0 * r.overall.j, 100.0 * r.overall.f,
                100.0 * r.overall.jf);
  return out + buf;
}

std::string report_svg(const MetricReport& r) {
  std::vector<std::pair<std::string, double>> bars;
  for (Category c : kAllCategories) {
    const Score& s = r.categories[static_cast<std::size_t>(c)];
    if (s.queries) bars.emplace_back(std::string(display_name(c)), s.jf);
  }
  bars.emplace_back("Overall", r.overall.jf);
  const int bar_w = 60, gap = 20, top = 20, chart_h = 200;
  const int width = gap + static_cast<int>(bars.size()) * (bar_w + gap);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(top + chart_h + 40) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const int x = gap + static_cast<int>(i) * (bar_w + gap);
    const int h = static_cast<int>(std::lround(bars[i].second * chart_h));
    const int y = top + chart_h - h;
    out += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(bar_w) +
           "\" height=\"" + std::to_string(h) + "\" fill=\"#4a78a8\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%.1f", 100.0 * bars[i].second);
    out += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(y - 4) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
    out += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(top + chart_h + 16) +
           "\" text-anchor=\"middle\">" + bars[i].first + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace orvos
