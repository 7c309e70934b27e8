#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace djp {

// Formats with 15 significant digits, the precision carried by every JSON and
// CSV output.
std::string format_number(double v);

// Streaming JSON writer with caller-controlled key order, so identical inputs
// produce byte-identical files.
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(const std::string& name);
  void value(double v);
  void value(int v);
  void value(std::uint64_t v);
  void value(bool v);
  void value(const std::string& v);
  void number_array(const std::vector<double>& values);

  std::string str() const { return out_; }

 private:
  void separator();

  std::string out_;
  std::vector<bool> needs_comma_;
  bool after_key_ = false;
};

// Writes through a temp file in the same directory followed by an atomic
// rename, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace djp
