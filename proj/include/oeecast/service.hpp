#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "oeecast/config.hpp"

namespace oeecast {

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/**
 * Read-only forecast service over a registry of equipment datasets.
 *
 *   GET /equipment                          ids, last observed timestamps
 *   GET /equipment/{id}/forecast?horizon=h  h in 1..8, default 4
 *   GET /equipment/{id}/decomposition       last 168 points per component
 *
 * Results are cached per (id, file modification time, file size); a changed
 * file is reloaded on the next request.
 */
class ForecastService {
 public:
  static constexpr std::size_t kDefaultHorizon = 4;
  static constexpr std::size_t kMaxHorizon = 8;
  static constexpr std::size_t kSnapshotLength = 168;

  explicit ForecastService(EquipmentRegistry registry);
  ~ForecastService();

  /// Routes one GET request; never throws.
  ServiceResponse handle(const std::string& path, const std::map<std::string, std::string>& query = {});

  ServiceResponse list();
  ServiceResponse forecast(const std::string& id, const std::string& horizon_text);
  ServiceResponse decomposition(const std::string& id);

  /// Blocks until stop() is called.
  void serve(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; serving continues in listen_after_bind().
  int bind_any_port(const std::string& host);
  void listen_after_bind();
  void stop();

 private:
  struct Entry;
  struct Stamp {
    std::filesystem::file_time_type mtime;
    std::uintmax_t size = 0;
    bool operator==(const Stamp&) const = default;
  };

  Entry& entry(const std::string& id);
  static Stamp stamp_of(const std::filesystem::path& path);
  ServiceResponse server_error(const std::string& id, const std::exception& e);

  EquipmentRegistry registry_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
  std::atomic<unsigned> error_counter_{0};
  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace oeecast
