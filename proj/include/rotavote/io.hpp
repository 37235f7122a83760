#pragma once

#include <string>
#include <vector>

#include "rotavote/estimator.hpp"
#include "rotavote/synth.hpp"
#include "rotavote/voting.hpp"

namespace rotavote {

// CSV columns x0,x1,x2,y0,y1,y2 with an optional header line. Strict float
// parsing; ParseError carries the offending line number.
std::vector<Correspondence> read_correspondences(const std::string& path);
void write_correspondences(const std::vector<Correspondence>& corrs, const std::string& path);

// Result document: JSON list of estimates, ordered as produced. Numeric
// fields round-trip bit-exact (angles in radians, matrix row-major).
void write_result(const std::vector<RotationEstimate>& estimates, const std::string& path);
std::vector<RotationEstimate> read_result(const std::string& path);

// Truth sidecar: per rotation 9 floats row-major, then the label list.
void write_truth(const SceneTruth& truth, const std::string& path);
SceneTruth read_truth(const std::string& path);

enum class DumpFormat { Text, Pgm };
void dump_accumulator(const Accumulator2D& acc, const std::string& path, DumpFormat format);

}  // namespace rotavote
