#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "regionq/hypothesis.hpp"
#include "regionq/oracle.hpp"
#include "regionq/regions.hpp"
#include "regionq/types.hpp"

namespace regionq {

// Dataset CSV: header `id,x1,...,xd`, ids contiguous from 0 in any row order.
PointSet read_points_csv(std::istream& in);
PointSet read_points_csv_file(const std::string& path);
void write_points_csv(std::ostream& out, const PointSet& s);

std::string region_to_json(const RegionDescriptor& r);
RegionDescriptor region_from_json(const std::string& text);
std::string hypothesis_to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const std::string& text);

// One JSON object per line: {"region": ..., "label": +-1, "answer": 0|1}.
void write_transcript_jsonl(std::ostream& out, const std::vector<TranscriptEntry>& transcript,
                            std::size_t begin = 0);

void write_predictions_csv(std::ostream& out, const LearnResult& r);

}  // namespace regionq
