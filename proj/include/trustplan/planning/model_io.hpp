#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "trustplan/planning/model.hpp"

namespace trustplan::planning {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// Model files are line-oriented text:
//
//   # comment
//   fluents: at-a at-b
//   action move-a-b cost 1 pre {at-a} add {at-b} del {at-a}
//   init {at-a}
//   goal {at-b}
//
// Names match [A-Za-z0-9_-]+. Costs are integers, decimals or fractions (5/2).
// Set entries may be separated by whitespace or commas.

/// Throws ParseError on syntax errors and ModelError on semantic ones.
PlanningModel parse_model(std::string_view text);
PlanningModel load_model(const std::filesystem::path& path);

/// Canonical form: sections in grammar order, entries sorted.
std::string serialize_model(const PlanningModel& model);

bool is_valid_name(std::string_view name);

}  // namespace trustplan::planning
