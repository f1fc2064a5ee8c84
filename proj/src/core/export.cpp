#include "core/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/biam.hpp"
#include "core/encoders.hpp"
#include "core/error.hpp"

namespace mmt {

Matrix alignment_w12(const ModelParams& p, const Utterance& utt) {
  const Matrix x = encode_speech_lower(utt.speech, p, false, nullptr, nullptr);
  const Matrix y = encode_text(utt.graphemes, p, false, nullptr, nullptr);
  return biam_forward(x, y).w12;
}

void export_alignment_csv(const Matrix& w12, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("export_alignment: cannot open '" + path + "'");
  char buf[64];
  for (std::size_t i = 0; i < w12.rows; ++i) {
    for (std::size_t j = 0; j < w12.cols; ++j) {
      // 9 significant digits: parsed rows must still sum to 1 within 1e-6,
      // which 6 digits cannot guarantee for near-uniform rows
      std::snprintf(buf, sizeof buf, "%.9g", w12(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw_data("export_alignment: write to '" + path + "' failed");
}

void export_alignment_pgm(const Matrix& w12, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("export_alignment: cannot open '" + path + "'");
  out << "P5\n" << w12.cols << ' ' << w12.rows << "\n255\n";
  for (double v : w12.data) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * clamped))));
  }
  if (!out) throw_data("export_alignment: write to '" + path + "' failed");
}

void export_alignment(const ModelParams& p, const Utterance& utt, const std::string& prefix) {
  const Matrix w12 = alignment_w12(p, utt);
  export_alignment_csv(w12, prefix + ".w12.csv");
  export_alignment_pgm(w12, prefix + ".w12.pgm");
}

}  // namespace mmt
