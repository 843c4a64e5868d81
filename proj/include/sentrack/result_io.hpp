#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sentrack/lattice.hpp"
#include "sentrack/linguistics.hpp"
#include "sentrack/retrieval.hpp"

namespace sentrack {

/// JSON number, or the strings "-inf" / "inf" for infinities.
std::string format_tau(double tau);
double parse_tau(std::string_view text);

/// {clip, sentence, tau, tracks:[{participant, role, detections, boxes}], words:[{word, args, states}]}
std::string result_document(const Clip& clip, std::string_view sentence, const Analysis& analysis,
                            const ScoredResult& result);

/// {sentence_id, sentence, ranking:[{rank, clip, tau}]}, one object per list.
std::string ranked_document(const std::vector<RankedList>& lists);

/// Stroke colour of a role's box.
std::string_view role_colour(Role role);

/// One SVG file per frame, frame_0001.svg onwards: every detection in grey,
/// participant boxes in their role colour. Returns the paths written.
std::vector<std::filesystem::path> write_overlays(const Clip& clip, const ArgumentMapping& mapping,
                                                  const ScoredResult& result, const std::filesystem::path& dir,
                                                  int width = 640, int height = 480);

}  // namespace sentrack
