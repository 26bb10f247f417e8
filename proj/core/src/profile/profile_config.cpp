// Profile text format:
//
//   [settings]
//   deadband = 15
//   moisture_polarity = wet_high | dry_high
//   base = default | none
//
//   [arousal soil light]      # output, row axis, column axis
//   L M M                     # full grid: three rows of L/M/H
//   L L L
//   H M H
//
//   [valence people soil]
//   Good Poor = M             # or single-cell overrides on top of the base
//
// '#' and ';' start comments. Sections not mentioned keep the base matrix.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include <fmt/format.h>

#include "iotavatar/error.hpp"
#include "iotavatar/profile/profile.hpp"

namespace iotavatar::profile {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<Input> parse_axis(std::string_view s) {
  const auto l = lower(s);
  if (l == "soil" || l == "moisture") return Input::soil;
  if (l == "light" || l == "brightness") return Input::light;
  if (l == "people") return Input::people;
  return std::nullopt;
}

std::optional<Level> parse_level(std::string_view s) {
  const auto l = lower(s);
  if (l == "l" || l == "low") return Level::low;
  if (l == "m" || l == "medium") return Level::medium;
  if (l == "h" || l == "high") return Level::high;
  return std::nullopt;
}

std::optional<std::size_t> parse_quality(std::string_view s) {
  const auto l = lower(s);
  for (std::size_t i = 0; i < fuzzy::kQualityLabels.size(); ++i) {
    if (l == lower(fuzzy::kQualityLabels[i])) return i;
  }
  return std::nullopt;
}

struct MatrixSection {
  std::size_t slot = 0;
  std::string title;
  int line = 0;
  RuleMatrix matrix;
  int grid_rows = 0;
  bool has_overrides = false;
};

class Parser {
 public:
  PlantProfile parse(std::string_view text) {
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
      line = trim(line);
      if (line.empty()) continue;
      handle(lineno, line);
    }
    finish_section();
    return build();
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& what) {
    throw ConfigError(fmt::format("profile line {}: {}", line, what));
  }

  void handle(int lineno, std::string_view line) {
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, fmt::format("unterminated section header '{}'", line));
      finish_section();
      open_section(lineno, trim(line.substr(1, line.size() - 2)));
      return;
    }
    if (in_settings_) {
      setting(lineno, line);
    } else if (current_) {
      matrix_line(lineno, line);
    } else {
      fail(lineno, fmt::format("'{}' appears before any section", line));
    }
  }

  void open_section(int lineno, std::string_view header) {
    const auto lower_header = lower(header);
    if (lower_header == "settings") {
      if (seen_settings_) fail(lineno, "duplicate [settings] section");
      seen_settings_ = true;
      in_settings_ = true;
      return;
    }
    in_settings_ = false;
    const auto parts = split_ws(header);
    if (parts.size() != 3) {
      fail(lineno, fmt::format("section [{}] must be [<arousal|valence> <row axis> <column axis>]", header));
    }
    const auto out_name = lower(parts[0]);
    if (out_name != "arousal" && out_name != "valence") {
      fail(lineno, fmt::format("section [{}]: unknown output '{}'", header, parts[0]));
    }
    const Output out = out_name == "arousal" ? Output::arousal : Output::valence;
    const auto row = parse_axis(parts[1]);
    const auto col = parse_axis(parts[2]);
    if (!row || !col) {
      fail(lineno, fmt::format("section [{}]: unknown axis '{}'", header, row ? parts[2] : parts[1]));
    }
    const auto slot = matrix_slot(out, *row, *col);
    if (!slot) {
      fail(lineno, fmt::format("section [{}]: pairing must be soil x light, people x light or people x soil", header));
    }
    const auto title = fmt::format("{} {} {}", output_name(out), axis_name(*row), axis_name(*col));
    if (const auto it = seen_.find(*slot); it != seen_.end()) {
      fail(lineno, fmt::format("duplicate matrix [{}] (first defined on line {})", title, it->second));
    }
    seen_.emplace(*slot, lineno);
    current_ = MatrixSection{*slot, title, lineno, RuleMatrix{out, *row, *col, {}}, 0, false};
  }

  void setting(int lineno, std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineno, fmt::format("expected key = value, got '{}'", line));
    const auto key = lower(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key == "deadband") {
      double d = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(lineno, fmt::format("deadband '{}' is not a number", value));
      }
      if (!(d >= 0.0 && d < kAffectMidpoint)) fail(lineno, fmt::format("deadband {} must lie in [0, 150)", d));
      deadband_ = d;
    } else if (key == "moisture_polarity") {
      const auto v = lower(value);
      if (v == "wet_high") {
        polarity_ = MoisturePolarity::wet_high;
      } else if (v == "dry_high") {
        polarity_ = MoisturePolarity::dry_high;
      } else {
        fail(lineno, fmt::format("moisture_polarity '{}' must be wet_high or dry_high", value));
      }
    } else if (key == "base") {
      const auto v = lower(value);
      if (v != "default" && v != "none") fail(lineno, fmt::format("base '{}' must be default or none", value));
      base_default_ = v == "default";
    } else {
      fail(lineno, fmt::format("unknown setting '{}'", key));
    }
  }

  void matrix_line(int lineno, std::string_view line) {
    auto& sec = *current_;
    const auto& m = sec.matrix;
    if (const auto eq = line.find('='); eq != std::string_view::npos) {
      if (sec.grid_rows > 0) fail(lineno, fmt::format("[{}] mixes grid rows with cell overrides", sec.title));
      const auto lhs = split_ws(line.substr(0, eq));
      const auto rhs = trim(line.substr(eq + 1));
      if (lhs.size() != 2) {
        fail(lineno, fmt::format("[{}] cell override must read '<{} term> <{} term> = L|M|H'", sec.title,
                                 axis_name(m.row), axis_name(m.column)));
      }
      const auto r = parse_quality(lhs[0]);
      const auto c = parse_quality(lhs[1]);
      if (!r) fail(lineno, fmt::format("[{}] unknown {} term '{}' (expected Poor, Average or Good)", sec.title,
                                       axis_name(m.row), lhs[0]));
      if (!c) fail(lineno, fmt::format("[{}] unknown {} term '{}' (expected Poor, Average or Good)", sec.title,
                                       axis_name(m.column), lhs[1]));
      const auto level = parse_level(rhs);
      if (!level) {
        fail(lineno, fmt::format("[{}] cell ({} {}, {} {}): unknown term label '{}' (expected L, M or H)", sec.title,
                                 axis_name(m.row), fuzzy::kQualityLabels[*r], axis_name(m.column),
                                 fuzzy::kQualityLabels[*c], rhs));
      }
      overrides_.push_back({sec.slot, *r, *c, *level});
      sec.has_overrides = true;
      return;
    }

    if (sec.has_overrides) fail(lineno, fmt::format("[{}] mixes cell overrides with grid rows", sec.title));
    const auto cells = split_ws(line);
    if (sec.grid_rows >= 3) fail(lineno, fmt::format("[{}] has more than three rows", sec.title));
    if (cells.size() != 3) {
      fail(lineno, fmt::format("[{}] row {} needs exactly three cells, got {}", sec.title, sec.grid_rows + 1,
                               cells.size()));
    }
    const auto r = static_cast<std::size_t>(sec.grid_rows);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto level = parse_level(cells[c]);
      if (!level) {
        fail(lineno, fmt::format("[{}] row {} ({} {}), column {} ({} {}): unknown term label '{}' (expected L, M or H)",
                                 sec.title, r + 1, axis_name(m.row), fuzzy::kQualityLabels[r], c + 1,
                                 axis_name(m.column), fuzzy::kQualityLabels[c], cells[c]));
      }
      sec.matrix.cells[r][c] = *level;
    }
    ++sec.grid_rows;
  }

  void finish_section() {
    if (!current_) return;
    const auto& sec = *current_;
    if (sec.grid_rows > 0 && sec.grid_rows < 3) {
      fail(sec.line, fmt::format("[{}] has {} of 3 rows", sec.title, sec.grid_rows));
    }
    if (sec.grid_rows == 3) grids_.emplace(sec.slot, sec.matrix);
    if (sec.grid_rows == 0 && !sec.has_overrides) fail(sec.line, fmt::format("[{}] is empty", sec.title));
    current_.reset();
  }

  PlantProfile build() {
    RuleMatrices matrices = default_matrices();
    std::vector<std::string> missing;
    for (std::size_t slot = 0; slot < kMatrixCount; ++slot) {
      if (const auto it = grids_.find(slot); it != grids_.end()) {
        matrices[slot] = it->second;
      } else if (!base_default_ && seen_.count(slot) == 0) {
        const auto& m = default_matrices()[slot];
        missing.push_back(fmt::format("[{} {} {}]", output_name(m.output), axis_name(m.row), axis_name(m.column)));
      } else if (!base_default_) {
        const auto& m = default_matrices()[slot];
        throw ConfigError(fmt::format("profile: [{} {} {}] only overrides cells but base = none needs a full grid",
                                      output_name(m.output), axis_name(m.row), axis_name(m.column)));
      }
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
      throw ConfigError(fmt::format("profile: base = none but matrices are missing: {}", list));
    }
    for (const auto& o : overrides_) matrices[o.slot].cells[o.row][o.column] = o.level;
    return PlantProfile(matrices, deadband_, polarity_);
  }

  struct Override {
    std::size_t slot;
    std::size_t row;
    std::size_t column;
    Level level;
  };

  bool in_settings_ = false;
  bool seen_settings_ = false;
  bool base_default_ = true;
  double deadband_ = kDefaultDeadband;
  MoisturePolarity polarity_ = MoisturePolarity::wet_high;
  std::optional<MatrixSection> current_;
  std::map<std::size_t, int> seen_;
  std::map<std::size_t, RuleMatrix> grids_;
  std::vector<Override> overrides_;
};

}  // namespace

PlantProfile load_profile(std::string_view text) { return Parser{}.parse(text); }

}  // namespace iotavatar::profile
