#include "topoproj/render.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace topoproj {

namespace {

// Distances map linearly onto [32, 255] with 255 for zero distance, so even
// the strongest ridge stays distinguishable from the black anchor markers.
constexpr int kDarkestShade = 32;

int shade_for(Scalar value, Scalar max_value) {
  if (max_value <= 0.0) return 255;
  const Scalar frac = value / max_value;
  return 255 - static_cast<int>(std::lround(frac * (255.0 - kDarkestShade)));
}

void write_anchor_sidecar(const UMatrix& um, const std::vector<Anchor>& anchors,
                          const std::string& image_path) {
  std::ofstream out(image_path + ".anchors.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + image_path + ".anchors.csv' for writing");
  out << "sample_id,unit,grid_row,grid_col,image_row,image_col\n";
  for (const Anchor& a : anchors) {
    const Index r = a.unit / um.cols, c = a.unit % um.cols;
    out << a.sample_id << ',' << a.unit << ',' << r << ',' << c << ',' << 2 * r << ',' << 2 * c
        << '\n';
  }
}

}  // namespace

void render_umatrix_pgm(const UMatrix& um, const std::vector<Anchor>& anchors,
                        const std::string& path) {
  const Index height = um.expanded.rows(), width = um.expanded.cols();
  const Scalar max_value = um.expanded.maxCoeff();

  std::vector<unsigned char> pixels(static_cast<std::size_t>(height * width));
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c)
      pixels[static_cast<std::size_t>(r * width + c)] =
          static_cast<unsigned char>(shade_for(um.expanded(r, c), max_value));

  for (const Anchor& a : anchors) {
    const Index r = a.unit / um.cols, c = a.unit % um.cols;
    if (r >= um.rows || c >= um.cols || a.unit < 0)
      throw std::invalid_argument("render_umatrix_pgm: anchor unit out of range");
    pixels[static_cast<std::size_t>(2 * r * width + 2 * c)] = 0;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");

  write_anchor_sidecar(um, anchors, path);
}

void render_umatrix_svg(const UMatrix& um, const std::vector<Anchor>& anchors,
                        const std::string& path) {
  const Index height = um.expanded.rows(), width = um.expanded.cols();
  const Scalar max_value = um.expanded.maxCoeff();
  constexpr int kCell = 12;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width * kCell << "\" height=\""
      << height * kCell << "\">\n";
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) {
      const int shade = shade_for(um.expanded(r, c), max_value);
      out << "<rect x=\"" << c * kCell << "\" y=\"" << r * kCell << "\" width=\"" << kCell
          << "\" height=\"" << kCell << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade
          << ")\"/>\n";
    }
  for (const Anchor& a : anchors) {
    const Index r = a.unit / um.cols, c = a.unit % um.cols;
    const Index cx = 2 * c * kCell + kCell / 2, cy = 2 * r * kCell + kCell / 2;
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << kCell / 3
        << "\" fill=\"red\"/>\n";
    out << "<text x=\"" << cx + kCell / 2 << "\" y=\"" << cy << "\" font-size=\"" << kCell
        << "\" fill=\"red\">" << a.sample_id << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");

  write_anchor_sidecar(um, anchors, path);
}

}  // namespace topoproj
