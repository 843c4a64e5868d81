#include "sentrack/result_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sentrack/error.hpp"

namespace sentrack {

using nlohmann::json;

namespace {

json tau_json(double tau) {
  if (std::isinf(tau)) return tau < 0 ? "-inf" : "inf";
  return tau;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_tau(double tau) { return tau_json(tau).dump(); }

double parse_tau(std::string_view text) {
  if (text == "\"-inf\"" || text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "\"inf\"" || text == "inf") return std::numeric_limits<double>::infinity();
  try {
    return json::parse(text).get<double>();
  } catch (const json::exception&) {
    throw ParseError("bad tau '" + std::string(text) + "'");
  }
}

std::string result_document(const Clip& clip, std::string_view sentence, const Analysis& analysis,
                            const ScoredResult& result) {
  const ArgumentMapping& m = analysis.mapping;
  json tracks = json::array();
  for (std::size_t l = 0; l < result.tracks.size(); ++l) {
    json boxes = json::array();
    for (const auto& [t, d] : track_boxes(clip, result.tracks[l]))
      boxes.push_back({d.box.x1, d.box.y1, d.box.x2, d.box.y2});
    json p = {{"participant", l + 1}, {"detections", result.tracks[l].indices}, {"boxes", std::move(boxes)}};
    if (l < m.roles.size()) p["role"] = to_string(m.roles[l]);
    tracks.push_back(std::move(p));
  }
  json words = json::array();
  for (std::size_t w = 0; w < m.words.size(); ++w) {
    json args = json::array();
    for (int a : m.words[w].args) args.push_back(a + 1);
    json states = w < result.word_states.size() ? json(result.word_states[w]) : json::array();
    words.push_back({{"word", m.words[w].lemma}, {"args", std::move(args)}, {"states", std::move(states)}});
  }
  json doc = {{"clip", clip.id},
              {"sentence", std::string(sentence)},
              {"tau", tau_json(result.tau)},
              {"tracks", std::move(tracks)},
              {"words", std::move(words)}};
  return doc.dump(1) + "\n";
}

std::string ranked_document(const std::vector<RankedList>& lists) {
  json out = json::array();
  for (const auto& l : lists) {
    json ranking = json::array();
    for (std::size_t i = 0; i < l.entries.size(); ++i)
      ranking.push_back({{"rank", i + 1}, {"clip", l.entries[i].clip_id}, {"tau", tau_json(l.entries[i].tau)}});
    out.push_back({{"sentence_id", l.sentence_id}, {"sentence", l.sentence}, {"ranking", std::move(ranking)}});
  }
  return out.dump(1) + "\n";
}

std::string_view role_colour(Role role) {
  switch (role) {
    case Role::Agent: return "red";
    case Role::Patient: return "blue";
    case Role::Source: return "violet";
    case Role::Goal: return "turquoise";
    case Role::Referent: return "green";
  }
  return "black";
}

std::vector<std::filesystem::path> write_overlays(const Clip& clip, const ArgumentMapping& mapping,
                                                  const ScoredResult& result, const std::filesystem::path& dir,
                                                  int width, int height) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.svg", t + 1);
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">" << clip.id << " frame " << t + 1
        << "</text>\n";
    auto rect = [&](const BBox& b, std::string_view colour, double stroke) {
      out << "<rect x=\"" << fmt(b.x1) << "\" y=\"" << fmt(b.y1) << "\" width=\"" << fmt(b.x2 - b.x1)
          << "\" height=\"" << fmt(b.y2 - b.y1) << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\""
          << stroke << "\"/>\n";
    };
    for (const auto& d : clip.frames[t].detections) rect(d.box, "lightgrey", 1);
    for (std::size_t l = 0; l < result.tracks.size(); ++l) {
      const int j = result.tracks[l].indices[t];
      const BBox& b = clip.frames[t].detections[static_cast<std::size_t>(j - 1)].box;
      const Role role = l < mapping.roles.size() ? mapping.roles[l] : Role::Agent;
      rect(b, role_colour(role), 3);
      out << "<text x=\"" << fmt(b.x1) << "\" y=\"" << fmt(b.y1 - 4) << "\" font-family=\"monospace\" "
          << "font-size=\"12\" fill=\"" << role_colour(role) << "\">" << to_string(role) << "</text>\n";
    }
    out << "</svg>\n";
    written.push_back(path);
  }
  return written;
}

}  // namespace sentrack
