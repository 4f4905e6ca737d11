#include <catch2/catch_amalgamated.hpp>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <string>
#include <thread>

#include <json.hpp>

#include "ronin/ground_client.hpp"

using namespace ronin;

namespace {

// One-shot JSON-lines server on an ephemeral port; handles n requests with
// the given responder and exits.
class MiniServer {
 public:
  explicit MiniServer(
      int requests,
      std::function<std::string(const nlohmann::json&)> responder)
      : responder_(std::move(responder)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(listen_fd_ >= 0);
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr),
                   sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    REQUIRE(::listen(listen_fd_, 8) == 0);
    thread_ = std::thread([this, requests] { serve(requests); });
  }

  ~MiniServer() {
    thread_.join();
    ::close(listen_fd_);
  }

  int port() const { return port_; }
  std::string address() const {
    return "127.0.0.1:" + std::to_string(port_);
  }

 private:
  void serve(int requests) {
    for (int i = 0; i < requests; ++i) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) return;
      std::string line;
      char ch;
      while (::recv(fd, &ch, 1, 0) == 1 && ch != '\n') line.push_back(ch);
      std::string reply = responder_(nlohmann::json::parse(line));
      reply.push_back('\n');
      ::send(fd, reply.data(), reply.size(), 0);
      ::close(fd);
    }
  }

  std::function<std::string(const nlohmann::json&)> responder_;
  std::thread thread_;
  int listen_fd_ = -1;
  int port_ = 0;
};

}  // namespace

TEST_CASE("socket MLLM client sends {image_path, prompt} and reads {text}") {
  MiniServer server(1, [](const nlohmann::json& req) {
    REQUIRE(req.at("image_path") == "/data/f.png");
    REQUIRE(req.at("prompt") == "Rate the quality of the image. Think step by step.");
    return nlohmann::json{{"text", "Looks noisy."}}.dump();
  });
  SocketMLLMClient client(server.address());
  REQUIRE(client.query("/data/f.png",
                       "Rate the quality of the image. Think step by step.") ==
          "Looks noisy.");
}

TEST_CASE("socket encoder client reads {embedding}") {
  MiniServer server(1, [](const nlohmann::json& req) {
    REQUIRE(req.at("text") == "severe snow");
    return nlohmann::json{{"embedding", {0.5f, -0.5f, 0.25f}}}.dump();
  });
  SocketTextEncoderClient client(server.address());
  const auto v = client.embed("severe snow");
  REQUIRE(v == std::vector<float>{0.5f, -0.5f, 0.25f});
  REQUIRE(client.dimension() == 3);
}

TEST_CASE("unreachable address raises a transport error") {
  // Port 1 on localhost is essentially never listening.
  SocketMLLMClient client("127.0.0.1:1", 500);
  REQUIRE_THROWS_AS(client.query("/x.png", "hello"), TransportError);
}

TEST_CASE("malformed response raises a transport error") {
  MiniServer server(1, [](const nlohmann::json&) { return "not json"; });
  SocketMLLMClient client(server.address());
  REQUIRE_THROWS_AS(client.query("/x.png", "hi"), TransportError);
}

TEST_CASE("bad address strings are parameter errors") {
  REQUIRE_THROWS_AS(SocketMLLMClient("nocolon"), ParameterError);
  REQUIRE_THROWS_AS(SocketMLLMClient("host:notaport"), ParameterError);
}
