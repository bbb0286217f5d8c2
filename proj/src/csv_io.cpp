#include "nmchaos/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "nmchaos/error.hpp"

namespace nmchaos {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer) {
  auto tmp = path;
  tmp += ".partial";
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw Error("cannot open " + tmp.string() + " for writing");
      writer(os);
      os.flush();
      if (!os) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

}  // namespace nmchaos
