#include "iecc/channel.hpp"
#include "iecc/protocol35.hpp"
#include "iecc/protocol611.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace iecc {

std::shared_ptr<const Protocol> make_protocol(const SessionConfig& cfg) {
    validate(cfg);
    using Key = std::tuple<int, std::size_t, std::int64_t, std::int64_t, std::size_t, std::int64_t, std::int64_t,
                           std::uint64_t>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const Protocol>> cache;

    const Key key{static_cast<int>(cfg.protocol), cfg.n, cfg.epsilon.numerator(), cfg.epsilon.denominator(), cfg.m,
                  cfg.code_epsilon.numerator(), cfg.code_epsilon.denominator(), cfg.seed};
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::shared_ptr<const Protocol> p;
    if (cfg.protocol == ProtocolKind::P611)
        p = std::make_shared<p611::Protocol611>(cfg);
    else
        p = std::make_shared<p35::Protocol35>(cfg);
    cache.emplace(key, p);
    return p;
}

} // namespace iecc
