#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/basic_socket_iostream.hpp>
#include <boost/asio/io_context.hpp>

#include "uiknow/bridge_environment.hpp"
#include "uiknow/error.hpp"

namespace uiknow {

namespace {

namespace asio = boost::asio;
using asio::ip::tcp;

class TcpTransport final : public LineTransport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout)
      : timeout_(timeout) {
    stream_.expires_after(timeout_);
    stream_.connect(host, std::to_string(port));
    if (!stream_) {
      throw Error(ErrorKind::EnvDisconnected, "cannot connect to bridge at " + host + ":" +
                                                  std::to_string(port) + ": " + stream_.error().message());
    }
  }

  std::string round_trip(const std::string& request_line) override {
    stream_.expires_after(timeout_);
    stream_ << request_line << '\n' << std::flush;
    std::string line;
    if (!stream_ || !std::getline(stream_, line)) {
      throw Error(ErrorKind::EnvDisconnected, "bridge connection lost: " + stream_.error().message());
    }
    return line;
  }

 private:
  std::chrono::milliseconds timeout_;
  tcp::iostream stream_;
};

}  // namespace

std::unique_ptr<LineTransport> make_tcp_transport(const std::string& host, std::uint16_t port,
                                                  std::chrono::milliseconds timeout) {
  return std::make_unique<TcpTransport>(host, port, timeout);
}

struct BridgeTcpServer::Impl {
  Impl(Environment& e, std::uint16_t port)
      : env(e), acceptor(io, tcp::endpoint(asio::ip::make_address("127.0.0.1"), port)) {}

  Environment& env;
  asio::io_context io;
  tcp::acceptor acceptor;
};

BridgeTcpServer::BridgeTcpServer(Environment& env, std::uint16_t port)
    : impl_(std::make_unique<Impl>(env, port)) {}

BridgeTcpServer::~BridgeTcpServer() = default;

std::uint16_t BridgeTcpServer::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void BridgeTcpServer::serve_one() {
  tcp::iostream stream;
  impl_->acceptor.accept(stream.socket());
  serve_bridge(impl_->env, stream, stream);
}

}  // namespace uiknow
