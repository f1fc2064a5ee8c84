#pragma once

#include <string>

#include "core/data.hpp"
#include "core/matrix.hpp"
#include "core/params.hpp"

namespace mmt {

// w12 of an utterance under the given parameters: lower speech stack and
// unmasked text encoder in inference mode, then the shared attention.
Matrix alignment_w12(const ModelParams& p, const Utterance& utt);

// CSV: one alignment row per line, 6 significant digits.
void export_alignment_csv(const Matrix& w12, const std::string& path);

// Binary PGM "P5 <cols> <rows> 255" with pixel value round(255 * w).
void export_alignment_pgm(const Matrix& w12, const std::string& path);

// Writes <prefix>.w12.csv and <prefix>.w12.pgm.
void export_alignment(const ModelParams& p, const Utterance& utt, const std::string& prefix);

}  // namespace mmt
