#include "permcorr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "permcorr/accumulate.hpp"
#include "permcorr/error.hpp"

namespace permcorr {

namespace {

void check_finite(std::span<const double> values, const char* which) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::nonfinite,
                  std::string("non-finite value in ") + which + " at index " + std::to_string(i));
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset make_dataset(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::parse, "x and y must have the same length");
  }
  if (x.size() < 2) {
    throw Error(Errc::too_small, "need at least 2 rows, got " + std::to_string(x.size()));
  }
  check_finite(x, "x");
  check_finite(y, "y");
  return Dataset{std::move(x), std::move(y)};
}

Dataset parse_csv(std::string_view text, bool has_header) {
  std::vector<double> x, y;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos >= text.size()) break;  // trailing newline
      throw Error(Errc::parse, "empty line " + std::to_string(line_no));
    }
    if (has_header && line_no == 1) continue;

    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(Errc::parse, "expected exactly two columns at line " + std::to_string(line_no));
    }
    double vx = 0.0, vy = 0.0;
    if (!parse_double(line.substr(0, comma), vx) || !parse_double(line.substr(comma + 1), vy)) {
      throw Error(Errc::parse, "malformed number at line " + std::to_string(line_no));
    }
    if (!std::isfinite(vx) || !std::isfinite(vy)) {
      throw Error(Errc::nonfinite, "non-finite value at line " + std::to_string(line_no));
    }
    x.push_back(vx);
    y.push_back(vy);
  }
  if (x.size() < 2) {
    throw Error(Errc::too_small, "need at least 2 rows, got " + std::to_string(x.size()));
  }
  return Dataset{std::move(x), std::move(y)};
}

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  std::string text;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw Error(Errc::io, "cannot read " + path);
  text.resize(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(text.data(), size);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  return parse_csv(text, has_header);
}

double CentralMoments::sigma() const { return std::sqrt(sums[2] / static_cast<double>(n)); }

std::vector<double> CentralMoments::moments() const {
  std::vector<double> out(sums.size());
  for (std::size_t j = 0; j < sums.size(); ++j) out[j] = sums[j] / static_cast<double>(n);
  return out;
}

CentralMoments central_moments(std::span<const double> values, int max_order) {
  if (values.empty()) throw Error(Errc::too_small, "central_moments: empty input");
  if (max_order < 1) throw Error(Errc::range, "central_moments: max_order must be >= 1");
  check_finite(values, "values");

  KahanSum<> mean_sum;
  for (double v : values) mean_sum.add(v);
  const double mean = mean_sum.value() / static_cast<double>(values.size());

  std::vector<KahanSum<>> acc(static_cast<std::size_t>(max_order) + 1);
  for (double v : values) {
    const double d = v - mean;
    double p = 1.0;
    for (int j = 1; j <= max_order; ++j) {
      p *= d;
      acc[static_cast<std::size_t>(j)].add(p);
    }
  }

  CentralMoments out;
  out.n = values.size();
  out.mean = mean;
  out.sums.resize(static_cast<std::size_t>(max_order) + 1);
  out.sums[0] = static_cast<double>(values.size());
  for (int j = 1; j <= max_order; ++j) {
    out.sums[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)].value();
  }
  return out;
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the value; midrank is the average of
    // the 1-based positions i+1 .. j+1
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

Dataset rank_transform(const Dataset& data) {
  return Dataset{midranks(data.x), midranks(data.y)};
}

bool has_ties(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

bool is_constant(std::span<const double> values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *lo == *hi;
}

double pearson_obs(const Dataset& data) {
  if (data.size() < 2) throw Error(Errc::too_small, "pearson_obs: need n >= 2");
  if (is_constant(data.x) || is_constant(data.y)) {
    throw Error(Errc::degenerate, "pearson_obs: zero variance");
  }
  KahanSum<> sx, sy;
  for (double v : data.x) sx.add(v);
  for (double v : data.y) sy.add(v);
  const double mx = sx.value() / static_cast<double>(data.size());
  const double my = sy.value() / static_cast<double>(data.size());

  KahanSum<> dot, xx, yy;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double dx = data.x[i] - mx;
    const double dy = data.y[i] - my;
    dot.add(dx * dy);
    xx.add(dx * dx);
    yy.add(dy * dy);
  }
  if (xx.value() <= 0.0 || yy.value() <= 0.0) {
    throw Error(Errc::degenerate, "pearson_obs: zero variance");
  }
  const double r = dot.value() / std::sqrt(xx.value() * yy.value());
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace permcorr
