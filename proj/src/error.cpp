#include "topola/error.hpp"

namespace topola {

void throw_config(const std::string& what) { throw Error(ErrorKind::kConfig, what); }
void throw_parse(const std::string& what) { throw Error(ErrorKind::kParse, what); }
void throw_io(const std::string& what) { throw Error(ErrorKind::kIo, what); }
void throw_numeric(const std::string& what) { throw Error(ErrorKind::kNumeric, what); }

}  // namespace topola
