#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace earlywarn {

enum class FinalResult : std::uint8_t { Distinction, Pass, Fail, Withdrawn };

const char* to_string(FinalResult result);
// Throws ParseError on an unrecognised label.
FinalResult parse_final_result(std::string_view text);

// One presentation of one course, e.g. ("BBB", "2013B").
struct Offering {
  std::string course_code;
  std::string presentation_code;

  auto operator<=>(const Offering&) const = default;
  std::string label() const { return course_code + "/" + presentation_code; }
};

bool is_presentation_code(std::string_view code);

// Interactions are stored compactly (the full log exceeds ten million rows):
// course/presentation and activity type are interned indices into OuladTables.
struct VleInteraction {
  std::int32_t student_id = 0;
  std::int32_t site_id = 0;
  std::int32_t day_offset = 0;
  std::int32_t click_count = 0;
  std::uint16_t offering = 0;  // index into OuladTables::offerings
  std::uint16_t activity = 0;  // index into OuladTables::activity_types

  bool operator==(const VleInteraction&) const = default;
};

struct VleItem {
  std::int32_t site_id = 0;
  std::string course_code;
  std::string presentation_code;
  std::string activity_type;

  bool operator==(const VleItem&) const = default;
};

struct StudentRecord {
  std::int32_t student_id = 0;
  std::string course_code;
  std::string presentation_code;
  FinalResult final_result = FinalResult::Pass;

  bool operator==(const StudentRecord&) const = default;
};

struct IngestSummary {
  std::map<std::string, std::size_t> rows_read;  // per CSV file name
  std::size_t rows_dropped_dangling = 0;         // site_id unknown to vle.csv
  std::size_t rows_dropped_unknown_student = 0;  // student absent from studentInfo.csv
  std::map<std::string, std::size_t> participants_per_presentation;  // "BBB/2013B" -> n

  bool operator==(const IngestSummary&) const = default;
};

struct OuladTables {
  std::vector<Offering> offerings;
  std::vector<std::string> activity_types;
  std::vector<VleInteraction> interactions;
  std::vector<VleItem> items;
  std::vector<StudentRecord> students;
  std::map<Offering, std::int32_t> course_lengths;  // days
  IngestSummary summary;

  std::optional<std::uint16_t> find_offering(std::string_view course,
                                             std::string_view presentation) const;
  std::uint16_t intern_offering(const std::string& course, const std::string& presentation);
  std::uint16_t intern_activity(const std::string& activity_type);

  const Offering& offering_of(const VleInteraction& row) const { return offerings[row.offering]; }
  const std::string& activity_of(const VleInteraction& row) const {
    return activity_types[row.activity];
  }

  bool operator==(const OuladTables&) const = default;
};

inline constexpr std::string_view kStudentVleFile = "studentVle.csv";
inline constexpr std::string_view kVleFile = "vle.csv";
inline constexpr std::string_view kStudentInfoFile = "studentInfo.csv";
inline constexpr std::string_view kCoursesFile = "courses.csv";

// Parses the four OULAD tables and resolves the site -> activity and
// interaction -> student joins. Rows failing a join are dropped and counted
// in OuladTables::summary.
OuladTables load_tables(const std::filesystem::path& dir);

// Learners of one presentation with at least one interaction row, ordered by
// ascending student_id. Throws UnknownCourse.
std::vector<StudentRecord> filter_participants(const OuladTables& tables, std::string_view course,
                                               std::string_view presentation);

// Recomputes summary.participants_per_presentation from the tables.
void count_participants(OuladTables& tables);

// Descriptive per-course counts (distinct activities, distinct sites, clicks).
struct CourseActivityCounts {
  std::size_t distinct_activity_types = 0;
  std::size_t distinct_sites = 0;
  std::int64_t total_clicks = 0;
};
std::map<std::string, CourseActivityCounts> course_activity_counts(const OuladTables& tables);

nlohmann::json summary_to_json(const OuladTables& tables);

}  // namespace earlywarn
