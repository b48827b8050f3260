#include "cli/config_file.hpp"

#include <fstream>

#include "slca/errors.hpp"

namespace slca::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' || line[i] == '\'') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::vector<std::string> config_file_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    const bool quoted = value.size() >= 2 && value.front() == value.back() &&
                        (value.front() == '"' || value.front() == '\'');
    if (quoted) {
      value = value.substr(1, value.size() - 2);
    } else if (value == "true") {
      tokens.push_back("--" + key);
      continue;
    } else if (value == "false") {
      continue;
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> config_tokens;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    auto t = config_file_tokens(path);
    config_tokens.insert(config_tokens.end(), t.begin(), t.end());
  }
  if (config_tokens.empty() || args.empty()) return args;
  std::vector<std::string> out;
  out.push_back(args.front());
  out.insert(out.end(), config_tokens.begin(), config_tokens.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace slca::cli
