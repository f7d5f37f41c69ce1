#include "quadsac/episode_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "quadsac/format.hpp"

namespace quadsac {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

double parse_double_field(const std::string& s, const std::string& path, int line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') first += 1;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": malformed number '" + s +
                             "'");
  }
  return v;
}

std::int64_t parse_int_field(const std::string& s, const std::string& path, int line) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": malformed integer '" + s +
                             "'");
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const char* expected_header,
                                               std::size_t expected_fields) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw std::runtime_error(path + ": unexpected header '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    line_no += 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expected_fields) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(expected_fields) + " fields, got " +
                               std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

void write_episode_csv(const std::string& path, const EpisodeRecord& record) {
  auto out = open_for_write(path);
  out << kEpisodeCsvHeader << '\n';
  for (const EpisodeStepRow& r : record.rows) {
    out << format_double(r.t);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.position[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.euler[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.ang_vel[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.target[i]);
    for (int i = 0; i < 4; ++i) out << ',' << format_double(r.action[i]);
    out << ',' << format_double(r.reward) << '\n';
  }
  finish_write(out, path);
}

EpisodeRecord read_episode_csv(const std::string& path) {
  EpisodeRecord record;
  const auto rows = read_csv(path, kEpisodeCsvHeader, 18);
  int line = 1;
  for (const auto& f : rows) {
    line += 1;
    EpisodeStepRow r;
    int k = 0;
    auto next = [&]() { return parse_double_field(f[k++], path, line); };
    r.t = next();
    for (int i = 0; i < 3; ++i) r.position[i] = next();
    for (int i = 0; i < 3; ++i) r.euler[i] = next();
    for (int i = 0; i < 3; ++i) r.ang_vel[i] = next();
    for (int i = 0; i < 3; ++i) r.target[i] = next();
    for (int i = 0; i < 4; ++i) r.action[i] = next();
    r.reward = next();
    record.total_reward += r.reward;
    record.rows.push_back(r);
  }
  record.steps = static_cast<int>(record.rows.size());
  return record;
}

void write_learning_curve_csv(const std::string& path,
                              const std::vector<LearningCurveRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].env_steps <= rows[i - 1].env_steps) {
      throw std::invalid_argument("learning curve rows must have strictly increasing env_steps");
    }
  }
  auto out = open_for_write(path);
  out << kCurveCsvHeader << '\n';
  for (const LearningCurveRow& r : rows) {
    out << r.env_steps << ',' << format_double(r.mean_eval_reward) << ','
        << format_double(r.q1_loss) << ',' << format_double(r.q2_loss) << ','
        << format_double(r.value_loss) << ',' << format_double(r.policy_loss) << ','
        << format_double(r.entropy) << '\n';
  }
  finish_write(out, path);
}

std::vector<LearningCurveRow> read_learning_curve_csv(const std::string& path) {
  std::vector<LearningCurveRow> rows;
  int line = 1;
  for (const auto& f : read_csv(path, kCurveCsvHeader, 7)) {
    line += 1;
    LearningCurveRow r;
    r.env_steps = parse_int_field(f[0], path, line);
    r.mean_eval_reward = parse_double_field(f[1], path, line);
    r.q1_loss = parse_double_field(f[2], path, line);
    r.q2_loss = parse_double_field(f[3], path, line);
    r.value_loss = parse_double_field(f[4], path, line);
    r.policy_loss = parse_double_field(f[5], path, line);
    r.entropy = parse_double_field(f[6], path, line);
    rows.push_back(r);
  }
  return rows;
}

void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows) {
  auto out = open_for_write(path);
  out << kRobustnessCsvHeader << '\n';
  for (const RobustnessRow& r : rows) {
    out << r.pose_index;
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.position0[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(r.attitude0[i]);
    out << ',' << r.steps << ',' << (r.terminated ? 1 : 0) << ','
        << format_double(r.total_reward) << '\n';
  }
  finish_write(out, path);
}

std::vector<RobustnessRow> read_robustness_csv(const std::string& path) {
  std::vector<RobustnessRow> rows;
  int line = 1;
  for (const auto& f : read_csv(path, kRobustnessCsvHeader, 10)) {
    line += 1;
    RobustnessRow r;
    r.pose_index = static_cast<int>(parse_int_field(f[0], path, line));
    for (int i = 0; i < 3; ++i) r.position0[i] = parse_double_field(f[1 + i], path, line);
    for (int i = 0; i < 3; ++i) r.attitude0[i] = parse_double_field(f[4 + i], path, line);
    r.steps = static_cast<int>(parse_int_field(f[7], path, line));
    r.terminated = parse_int_field(f[8], path, line) != 0;
    r.total_reward = parse_double_field(f[9], path, line);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace quadsac
