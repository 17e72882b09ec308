#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "lpbound/catalog.hpp"

namespace lpbound {

class CatalogError : public std::runtime_error {
 public:
  enum class Kind { io, version, checksum, format };
  CatalogError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr int kCatalogVersion = 1;

std::string serialize_catalog(const Catalog& c);
Catalog deserialize_catalog(const std::string& text);

/// Bytes taken by each relation's statistic lines in the serialized form.
std::map<std::string, std::size_t> serialized_bytes_by_relation(const Catalog& c);

void save_catalog(const Catalog& c, const std::filesystem::path& path);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace lpbound
