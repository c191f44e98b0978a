#include "carpetlab_cli/render.hpp"

#include <set>
#include <sstream>
#include <tuple>

#include "carpetlab/errors.hpp"

namespace carpetlab::cli {
namespace {

constexpr double kGap = 0.1;

std::string num(const Scalar& x) { return to_decimal_string(x, 12); }

using Rect = std::tuple<Scalar, Scalar, Scalar, Scalar>;  // x0, y0, w, h

// Figure y axis points down; flip so the picture matches the usual axes.
Rect flat(const Box& b, int ax, int ay) {
  if (b.dim() == 1) {
    return {b[0].lo, Scalar(9, 20), b[0].length(), Scalar(1, 10)};
  }
  return {b[ax].lo, Scalar(1) - b[ay].hi, b[ax].length(), b[ay].length()};
}

void emit(std::ostringstream& os, const Rect& r, const Scalar& dx, const char* style) {
  os << "    <rect x=\"" << num(std::get<0>(r) + dx) << "\" y=\"" << num(std::get<1>(r))
     << "\" width=\"" << num(std::get<2>(r)) << "\" height=\"" << num(std::get<3>(r))
     << "\" " << style << "/>\n";
}

}  // namespace

std::string render_levelset(const LevelSet& ls, const std::vector<Box>& holes,
                            std::size_t max_boxes) {
  if (ls.size() + holes.size() > max_boxes) {
    throw EnumerationBudget("figure boxes", ls.size() + holes.size(), max_boxes);
  }
  const int d = ls.spec().dim();
  const std::vector<std::pair<int, int>> panels =
      d == 3 ? std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}}
             : std::vector<std::pair<int, int>>{{0, 1}};
  const double width = static_cast<double>(panels.size()) + kGap * static_cast<double>(panels.size() - 1);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width
     << " 1\" width=\"" << static_cast<int>(512 * width) << "\" height=\"512\">\n";
  os << "  <title>level " << ls.level() << ", " << ls.size() << " boxes</title>\n";
  const std::vector<Box> boxes = ls.boxes();
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto [ax, ay] = panels[pi];
    const Scalar dx = Scalar(static_cast<long>(pi)) * (1 + Scalar(1, 10));
    os << "  <g>\n";
    emit(os, {Scalar(0), Scalar(0), Scalar(1), Scalar(1)}, dx,
         "fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"0.002\"");
    // Projections repeat; draw each rectangle once, in sorted order.
    std::set<Rect> seen;
    for (const auto& b : boxes) seen.insert(flat(b, ax, ay));
    for (const auto& r : seen) emit(os, r, dx, "fill=\"#303030\"");
    std::set<Rect> hole_rects;
    for (const auto& h : holes) hole_rects.insert(flat(h, ax, ay));
    for (const auto& r : hole_rects) {
      emit(os, r, dx, "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.002\"");
    }
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace carpetlab::cli
