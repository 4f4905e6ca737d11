#ifndef RONIN_GROUND_CLIENT_HPP
#define RONIN_GROUND_CLIENT_HPP

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

#include "ronin/common.hpp"

namespace ronin {

// A model that takes (image, prompt) and answers in free-form text.
class MLLMClient {
 public:
  virtual ~MLLMClient() = default;
  virtual std::string query(const std::filesystem::path& image_path,
                            const std::string& prompt) = 0;
};

// A text encoder mapping descriptions to fixed-dimension embeddings.
class TextEncoderClient {
 public:
  virtual ~TextEncoderClient() = default;
  virtual std::vector<float> embed(const std::string& text) = 0;
  virtual int dimension() const = 0;
  virtual std::string encoder_id() const = 0;
};

// ---------------------------------------------------------------------------
// Wire protocol: newline-delimited UTF-8 JSON over a local TCP socket.
//   {"image_path": ..., "prompt": ...} -> {"text": ...}
//   {"text": ...}                      -> {"embedding": [f32...]}
// One request per connection. Failures surface as TransportError.
// ---------------------------------------------------------------------------

namespace detail {

class LineSocket {
 public:
  LineSocket(const std::string& host, int port, int timeout_ms) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("socket() failed");
    timeval tv{};
    tv.tv_sec = timeout_ms / 1000;
    tv.tv_usec = (timeout_ms % 1000) * 1000;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      hostent* he = ::gethostbyname(host.c_str());
      if (he == nullptr || he->h_addrtype != AF_INET) {
        ::close(fd_);
        throw TransportError("cannot resolve host: " + host);
      }
      std::memcpy(&addr.sin_addr, he->h_addr_list[0], sizeof(addr.sin_addr));
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) !=
        0) {
      ::close(fd_);
      throw TransportError("cannot connect to " + host + ":" +
                           std::to_string(port));
    }
  }
  ~LineSocket() {
    if (fd_ >= 0) ::close(fd_);
  }
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;

  void send_line(const std::string& line) {
    std::string payload = line;
    payload.push_back('\n');
    std::size_t sent = 0;
    while (sent < payload.size()) {
      const ssize_t n =
          ::send(fd_, payload.data() + sent, payload.size() - sent, 0);
      if (n <= 0) throw TransportError("send failed or timed out");
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string recv_line() {
    std::string line;
    char ch;
    while (true) {
      const ssize_t n = ::recv(fd_, &ch, 1, 0);
      if (n <= 0) throw TransportError("recv failed or timed out");
      if (ch == '\n') break;
      line.push_back(ch);
    }
    return line;
  }

 private:
  int fd_ = -1;
};

inline std::pair<std::string, int> parse_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos)
    throw ParameterError("address must be host:port, got: " + addr);
  const std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw ParameterError("bad port in address: " + addr);
  }
  return {host, port};
}

}  // namespace detail

class SocketMLLMClient : public MLLMClient {
 public:
  explicit SocketMLLMClient(const std::string& address, int timeout_ms = 10000)
      : timeout_ms_(timeout_ms) {
    std::tie(host_, port_) = detail::parse_address(address);
  }

  std::string query(const std::filesystem::path& image_path,
                    const std::string& prompt) override {
    nlohmann::json req;
    req["image_path"] = image_path.string();
    req["prompt"] = prompt;
    detail::LineSocket sock(host_, port_, timeout_ms_);
    sock.send_line(req.dump());
    nlohmann::json resp;
    try {
      resp = nlohmann::json::parse(sock.recv_line());
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed response: ") + e.what());
    }
    if (!resp.contains("text"))
      throw TransportError("response missing 'text' field");
    return resp["text"].get<std::string>();
  }

 private:
  std::string host_;
  int port_ = 0;
  int timeout_ms_;
};

class SocketTextEncoderClient : public TextEncoderClient {
 public:
  explicit SocketTextEncoderClient(const std::string& address,
                                   int timeout_ms = 10000)
      : address_(address), timeout_ms_(timeout_ms) {
    std::tie(host_, port_) = detail::parse_address(address);
  }

  std::vector<float> embed(const std::string& text) override {
    nlohmann::json req;
    req["text"] = text;
    detail::LineSocket sock(host_, port_, timeout_ms_);
    sock.send_line(req.dump());
    nlohmann::json resp;
    try {
      resp = nlohmann::json::parse(sock.recv_line());
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed response: ") + e.what());
    }
    if (!resp.contains("embedding"))
      throw TransportError("response missing 'embedding' field");
    auto vec = resp["embedding"].get<std::vector<float>>();
    if (dimension_ == 0) dimension_ = static_cast<int>(vec.size());
    return vec;
  }

  // Dimension is learned from the first response.
  int dimension() const override {
    if (dimension_ == 0) {
      auto* self = const_cast<SocketTextEncoderClient*>(this);
      self->embed("dimension probe");
    }
    return dimension_;
  }

  std::string encoder_id() const override { return "socket:" + address_; }

 private:
  std::string address_, host_;
  int port_ = 0;
  int timeout_ms_;
  int dimension_ = 0;
};

}  // namespace ronin

#endif  // RONIN_GROUND_CLIENT_HPP
