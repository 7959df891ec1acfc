#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace fixture {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Hand-written OULAD-shaped tables. Notable rows:
//   student 13 is registered with no clicks; site 99 is dangling; student 77
//   is absent from studentInfo; site 4 ("quiz") exists only in the 2014J
//   presentation; student 22 clicks on day 300, beyond a 40-week tensor.
// Columns are deliberately not in the upstream order.
inline void write_mini_oulad(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "courses.csv",
             "code_module,code_presentation,module_presentation_length\n"
             "AAA,2013J,268\n"
             "AAA,2014J,269\n"
             "BBB,2013B,240\n");
  write_file(dir / "vle.csv",
             "id_site,code_module,code_presentation,activity_type,week_from,week_to\n"
             "1,AAA,2013J,forumng,,\n"
             "2,AAA,2013J,resource,,\n"
             "3,AAA,2014J,forumng,,\n"
             "4,AAA,2014J,quiz,,\n"
             "5,BBB,2013B,oucontent,,\n");
  write_file(dir / "studentInfo.csv",
             "code_module,code_presentation,id_student,gender,region,final_result\n"
             "AAA,2013J,11,M,\"East, Anglian\",Pass\n"
             "AAA,2013J,12,F,Wales,Withdrawn\n"
             "AAA,2013J,13,F,Wales,Fail\n"
             "AAA,2014J,21,M,Wales,Distinction\n"
             "AAA,2014J,22,M,Wales,Fail\n"
             "BBB,2013B,31,F,Wales,Pass\n");
  write_file(dir / "studentVle.csv",
             "id_student,code_module,code_presentation,id_site,date,sum_click\r\n"
             "11,AAA,2013J,1,2,3\r\n"
             "11,AAA,2013J,1,5,2\r\n"
             "11,AAA,2013J,2,-5,4\r\n"
             "12,AAA,2013J,2,15,1\r\n"
             "12,AAA,2013J,99,3,7\r\n"
             "21,AAA,2014J,3,8,6\r\n"
             "21,AAA,2014J,4,9,5\r\n"
             "22,AAA,2014J,3,300,2\r\n"
             "77,AAA,2014J,3,1,1\r\n"
             "31,BBB,2013B,5,0,1\r\n");
}

}  // namespace fixture
