#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "earlywarn/error.hpp"
#include "earlywarn/ingest.hpp"
#include "ingest/csv_reader.hpp"

namespace earlywarn {

namespace {

std::uint64_t pack(std::int32_t id, std::uint16_t offering) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)) << 16) | offering;
}

std::string located(const detail::CsvReader& csv, const std::string& what) {
  return csv.file_name() + ":" + std::to_string(csv.line_number()) + ": " + what;
}

std::string presentation_field(const detail::CsvReader& csv, std::size_t column) {
  std::string code(csv.field(column));
  if (!is_presentation_code(code)) {
    throw Error(ErrorCode::ParseError, located(csv, "malformed presentation code '" + code + "'"));
  }
  return code;
}

// Offering lookup from the two code columns, memoising the previous row since
// the large tables are grouped by presentation.
class OfferingLookup {
 public:
  explicit OfferingLookup(OuladTables& tables) : tables_(tables) {
    for (std::size_t i = 0; i < tables.offerings.size(); ++i) {
      index_.emplace(key(tables.offerings[i].course_code, tables.offerings[i].presentation_code),
                     static_cast<std::uint16_t>(i));
    }
  }

  std::uint16_t operator()(const detail::CsvReader& csv, std::size_t course_col,
                           std::size_t presentation_col) {
    const std::string_view course = csv.field(course_col);
    const std::string_view presentation = csv.field(presentation_col);
    if (has_last_ && course == last_course_ && presentation == last_presentation_) return last_;
    std::string code = presentation_field(csv, presentation_col);
    const std::string k = key(course, code);
    auto it = index_.find(k);
    if (it == index_.end()) {
      const std::uint16_t id = tables_.intern_offering(std::string(course), code);
      it = index_.emplace(k, id).first;
    }
    last_course_ = course;
    last_presentation_ = presentation;
    last_ = it->second;
    has_last_ = true;
    return last_;
  }

 private:
  static std::string key(std::string_view course, std::string_view presentation) {
    std::string k(course);
    k.push_back('\x1f');
    k.append(presentation);
    return k;
  }

  OuladTables& tables_;
  std::unordered_map<std::string, std::uint16_t> index_;
  std::string last_course_;
  std::string last_presentation_;
  std::uint16_t last_ = 0;
  bool has_last_ = false;
};

}  // namespace

const char* to_string(FinalResult result) {
  switch (result) {
    case FinalResult::Distinction: return "Distinction";
    case FinalResult::Pass: return "Pass";
    case FinalResult::Fail: return "Fail";
    case FinalResult::Withdrawn: return "Withdrawn";
  }
  return "?";
}

FinalResult parse_final_result(std::string_view text) {
  if (text == "Distinction") return FinalResult::Distinction;
  if (text == "Pass") return FinalResult::Pass;
  if (text == "Fail") return FinalResult::Fail;
  if (text == "Withdrawn") return FinalResult::Withdrawn;
  throw Error(ErrorCode::ParseError, "unknown final_result '" + std::string(text) + "'");
}

bool is_presentation_code(std::string_view code) {
  if (code.size() != 5) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (code[i] < '0' || code[i] > '9') return false;
  }
  return code[4] == 'B' || code[4] == 'J';
}

std::optional<std::uint16_t> OuladTables::find_offering(std::string_view course,
                                                        std::string_view presentation) const {
  for (std::size_t i = 0; i < offerings.size(); ++i) {
    if (offerings[i].course_code == course && offerings[i].presentation_code == presentation) {
      return static_cast<std::uint16_t>(i);
    }
  }
  return std::nullopt;
}

std::uint16_t OuladTables::intern_offering(const std::string& course,
                                           const std::string& presentation) {
  if (auto found = find_offering(course, presentation)) return *found;
  if (offerings.size() >= UINT16_MAX) {
    throw Error(ErrorCode::SchemaError, "too many course presentations");
  }
  offerings.push_back({course, presentation});
  return static_cast<std::uint16_t>(offerings.size() - 1);
}

std::uint16_t OuladTables::intern_activity(const std::string& activity_type) {
  const auto it = std::find(activity_types.begin(), activity_types.end(), activity_type);
  if (it != activity_types.end()) return static_cast<std::uint16_t>(it - activity_types.begin());
  if (activity_types.size() >= UINT16_MAX) {
    throw Error(ErrorCode::SchemaError, "too many activity types");
  }
  activity_types.push_back(activity_type);
  return static_cast<std::uint16_t>(activity_types.size() - 1);
}

OuladTables load_tables(const std::filesystem::path& dir) {
  for (auto name : {kStudentVleFile, kVleFile, kStudentInfoFile, kCoursesFile}) {
    if (!std::filesystem::is_regular_file(dir / name)) {
      throw Error(ErrorCode::MissingFile, (dir / name).string());
    }
  }

  OuladTables tables;

  {
    detail::CsvReader csv(dir / kCoursesFile);
    const auto c_course = csv.column("code_module");
    const auto c_pres = csv.column("code_presentation");
    const auto c_length = csv.column("module_presentation_length");
    std::size_t rows = 0;
    while (csv.next()) {
      const std::string course(csv.field(c_course));
      const std::string pres = presentation_field(csv, c_pres);
      const std::uint16_t id = tables.intern_offering(course, pres);
      tables.course_lengths[tables.offerings[id]] = csv.integer(c_length);
      ++rows;
    }
    tables.summary.rows_read[std::string(kCoursesFile)] = rows;
  }

  OfferingLookup offering_of(tables);

  // (site_id, offering) -> activity index
  std::unordered_map<std::uint64_t, std::uint16_t> site_activity;
  {
    detail::CsvReader csv(dir / kVleFile);
    const auto c_site = csv.column("id_site");
    const auto c_course = csv.column("code_module");
    const auto c_pres = csv.column("code_presentation");
    const auto c_type = csv.column("activity_type");
    std::size_t rows = 0;
    while (csv.next()) {
      VleItem item;
      item.site_id = csv.integer(c_site);
      const std::uint16_t off = offering_of(csv, c_course, c_pres);
      item.course_code = tables.offerings[off].course_code;
      item.presentation_code = tables.offerings[off].presentation_code;
      item.activity_type = std::string(csv.field(c_type));
      if (item.activity_type.empty()) {
        throw Error(ErrorCode::ParseError, located(csv, "empty activity_type"));
      }
      const std::uint16_t activity = tables.intern_activity(item.activity_type);
      if (!site_activity.emplace(pack(item.site_id, off), activity).second) {
        throw Error(ErrorCode::ParseError,
                    located(csv, "duplicate site " + std::to_string(item.site_id)));
      }
      tables.items.push_back(std::move(item));
      ++rows;
    }
    tables.summary.rows_read[std::string(kVleFile)] = rows;
  }

  std::unordered_set<std::uint64_t> enrolled;
  {
    detail::CsvReader csv(dir / kStudentInfoFile);
    const auto c_course = csv.column("code_module");
    const auto c_pres = csv.column("code_presentation");
    const auto c_student = csv.column("id_student");
    const auto c_result = csv.column("final_result");
    std::size_t rows = 0;
    while (csv.next()) {
      StudentRecord record;
      record.student_id = csv.integer(c_student);
      const std::uint16_t off = offering_of(csv, c_course, c_pres);
      record.course_code = tables.offerings[off].course_code;
      record.presentation_code = tables.offerings[off].presentation_code;
      try {
        record.final_result = parse_final_result(csv.field(c_result));
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, located(csv, e.what()));
      }
      if (!enrolled.insert(pack(record.student_id, off)).second) {
        throw Error(ErrorCode::ParseError,
                    located(csv, "duplicate student " + std::to_string(record.student_id)));
      }
      tables.students.push_back(std::move(record));
      ++rows;
    }
    tables.summary.rows_read[std::string(kStudentInfoFile)] = rows;
  }

  {
    detail::CsvReader csv(dir / kStudentVleFile);
    const auto c_course = csv.column("code_module");
    const auto c_pres = csv.column("code_presentation");
    const auto c_student = csv.column("id_student");
    const auto c_site = csv.column("id_site");
    const auto c_date = csv.column("date");
    const auto c_clicks = csv.column("sum_click");
    std::size_t rows = 0;
    while (csv.next()) {
      ++rows;
      VleInteraction row;
      row.offering = offering_of(csv, c_course, c_pres);
      row.student_id = csv.integer(c_student);
      row.site_id = csv.integer(c_site);
      row.day_offset = csv.integer(c_date);
      row.click_count = csv.integer(c_clicks);
      if (row.click_count < 1) {
        throw Error(ErrorCode::ParseError, located(csv, "sum_click must be >= 1"));
      }
      const auto site = site_activity.find(pack(row.site_id, row.offering));
      if (site == site_activity.end()) {
        ++tables.summary.rows_dropped_dangling;
        continue;
      }
      if (!enrolled.contains(pack(row.student_id, row.offering))) {
        ++tables.summary.rows_dropped_unknown_student;
        continue;
      }
      row.activity = site->second;
      tables.interactions.push_back(row);
    }
    tables.summary.rows_read[std::string(kStudentVleFile)] = rows;
  }

  count_participants(tables);
  return tables;
}

std::vector<StudentRecord> filter_participants(const OuladTables& tables, std::string_view course,
                                               std::string_view presentation) {
  const auto offering = tables.find_offering(course, presentation);
  if (!offering) {
    throw Error(ErrorCode::UnknownCourse, std::string(course) + "/" + std::string(presentation));
  }
  std::unordered_set<std::int32_t> active;
  for (const auto& row : tables.interactions) {
    if (row.offering == *offering) active.insert(row.student_id);
  }
  std::vector<StudentRecord> out;
  for (const auto& s : tables.students) {
    if (s.course_code == course && s.presentation_code == presentation &&
        active.contains(s.student_id)) {
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const StudentRecord& a, const StudentRecord& b) { return a.student_id < b.student_id; });
  return out;
}

void count_participants(OuladTables& tables) {
  std::vector<std::unordered_set<std::int32_t>> active(tables.offerings.size());
  for (const auto& row : tables.interactions) active[row.offering].insert(row.student_id);

  auto& counts = tables.summary.participants_per_presentation;
  counts.clear();
  for (const auto& s : tables.students) {
    const auto off = tables.find_offering(s.course_code, s.presentation_code);
    const std::string label = tables.offerings[*off].label();
    auto& n = counts[label];
    if (active[*off].contains(s.student_id)) ++n;
  }
}

std::map<std::string, CourseActivityCounts> course_activity_counts(const OuladTables& tables) {
  std::map<std::string, std::set<std::uint16_t>> types;
  std::map<std::string, std::set<std::int32_t>> sites;
  std::map<std::string, CourseActivityCounts> out;
  for (const auto& row : tables.interactions) {
    const std::string& course = tables.offerings[row.offering].course_code;
    types[course].insert(row.activity);
    sites[course].insert(row.site_id);
    out[course].total_clicks += row.click_count;
  }
  for (auto& [course, counts] : out) {
    counts.distinct_activity_types = types[course].size();
    counts.distinct_sites = sites[course].size();
  }
  return out;
}

nlohmann::json summary_to_json(const OuladTables& tables) {
  nlohmann::json j;
  std::size_t total = 0;
  for (const auto& [file, n] : tables.summary.rows_read) total += n;
  j["rows_read"] = tables.summary.rows_read;
  j["rows_read_total"] = total;
  j["rows_dropped_dangling"] = tables.summary.rows_dropped_dangling;
  j["rows_dropped_unknown_student"] = tables.summary.rows_dropped_unknown_student;
  j["interactions_retained"] = tables.interactions.size();
  j["participants_per_presentation"] = tables.summary.participants_per_presentation;
  nlohmann::json courses = nlohmann::json::object();
  for (const auto& [course, c] : course_activity_counts(tables)) {
    courses[course] = {{"distinct_activity_types", c.distinct_activity_types},
                       {"distinct_sites", c.distinct_sites},
                       {"total_clicks", c.total_clicks}};
  }
  j["course_activity"] = courses;
  return j;
}

}  // namespace earlywarn
