#pragma once

#include <filesystem>
#include <string>

#include <unistd.h>

#include "subs/corpus_io.hpp"
#include "subs/domain.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(SUBS_DATA_DIR) / rel;
}

inline const subs::Domain& geo_domain() {
  static const subs::Domain d = subs::load_domain_file(data_path("geoquery/domain.json"));
  return d;
}

inline const subs::Domain& scan_domain() {
  static const subs::Domain d = subs::load_domain_file(data_path("scan/domain.json"));
  return d;
}

inline const char* kSwapProgram =
    "answer ( population_1 ( largest ( city ( loc_2 ( smallest ( state ( loc_2 ( countryid ( usa "
    ") ) ) ) ) ) ) ) )";
inline const char* kSwapUtterance =
    "what is the population of the largest city in the smallest state in the usa";

inline const char* kSwapHostTree =
    "(what:answer ((is the) (population:population_1 ((of the) (largest:largest "
    "state:state#all)))))";
inline const char* kSwapDonorTree =
    "(what:answer ((is the) (largest:largest (city:city (in:loc_2 (the (smallest:smallest "
    "(state:state (in:loc_2 (the usa:countryid#usa))))))))))";

// Fresh temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("subs-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
