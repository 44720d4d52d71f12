#pragma once

// HTTP + WebSocket front end for a LiveSimulation.
//
//   GET /metrics.csv   current metrics series as CSV
//   GET /...           static files from ui_dir (index.html for "/")
//   WS  any path       newline-delimited JSON frames, one per text message
//
// The server runs on a caller-owned io_context. Sessions get a hello and a
// snapshot on connect; commands are submitted to the simulation and the
// immediate reply goes back to the sender. Simulation events arrive via
// sink() and are fanned out to sessions on their own strands.

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "episim/control.hpp"

namespace episim::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  std::filesystem::path ui_dir;
  std::size_t max_queued_frames = 512;  // per client; live updates beyond this are dropped
};

namespace detail {

inline std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".csv") return "text/csv";
  return "application/octet-stream";
}

inline constexpr const char* kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>episim</title></head>\n"
    "<body><p>episim is running. Connect a WebSocket client to this address.</p>\n"
    "<p><a href=\"/metrics.csv\">metrics.csv</a></p></body></html>\n";

}  // namespace detail

class Server;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Server& server, ClientId id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  ClientId id() const { return id_; }

  template <class Body, class Allocator>
  void start(http::request<Body, http::basic_fields<Allocator>> req);

  /// Thread-safe; the frame is written on the session's strand.
  void send(std::shared_ptr<const std::string> frame, bool droppable) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), frame, droppable] {
      self->enqueue(frame, droppable);
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closing_) return;
      self->closing_ = true;
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
      beast::get_lowest_layer(self->ws_).close();
    });
  }

 private:
  void on_accept(beast::error_code ec);
  void do_read();
  void on_read(beast::error_code ec, std::size_t);
  void handle_frame(const std::string& frame);

  void enqueue(std::shared_ptr<const std::string> frame, bool droppable);
  void do_write();

  websocket::stream<beast::tcp_stream> ws_;
  Server& server_;
  ClientId id_;
  beast::flat_buffer read_buffer_;
  std::string pending_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  bool writing_ = false;
  bool closing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Server& server) : stream_(std::move(socket)), server_(server) {}

  void start() {
    asio::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(1 << 20);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec);

  http::response<http::string_body> respond(const http::request<http::string_body>& req) const;

  beast::tcp_stream stream_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::shared_ptr<http::response<http::string_body>> response_;
};

class Server {
 public:
  Server(asio::io_context& io, LiveSimulation& live, ServerOptions options)
      : io_(io), live_(live), options_(std::move(options)), acceptor_(asio::make_strand(io)) {
    const tcp::endpoint endpoint(asio::ip::make_address(options_.address), options_.port);
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(asio::socket_base::max_listen_connections);
  }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }
  std::string address() const { return acceptor_.local_endpoint().address().to_string(); }

  void start() { do_accept(); }

  /// Stops accepting and closes every open session.
  void stop() {
    asio::post(acceptor_.get_executor(), [this] {
      beast::error_code ec;
      acceptor_.close(ec);
    });
    std::lock_guard lock(mutex_);
    for (auto& [_, weak] : sessions_) {
      if (auto s = weak.lock()) s->close();
    }
  }

  /// Event sink to install on the LiveSimulation.
  EventSink sink() {
    return [this](const Outbound& out) { dispatch(out); };
  }

  std::size_t client_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

  LiveSimulation& live() { return live_; }
  const ServerOptions& options() const { return options_; }

 private:
  friend class WsSession;
  friend class HttpSession;

  void do_accept() {
    acceptor_.async_accept(asio::make_strand(io_), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpSession>(std::move(socket), *this)->start();
      do_accept();
    });
  }

  ClientId add(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(mutex_);
    sessions_[s->id()] = s;
    return s->id();
  }

  void remove(ClientId id) {
    std::lock_guard lock(mutex_);
    sessions_.erase(id);
  }

  ClientId next_id() { return next_id_++; }

  void dispatch(const Outbound& out) {
    const bool droppable = std::holds_alternative<MetricsMsg>(out.message) ||
                           std::holds_alternative<SnapshotMsg>(out.message);
    std::shared_ptr<const std::string> frame;
    std::lock_guard lock(mutex_);
    if (sessions_.empty()) return;
    frame = std::make_shared<const std::string>(encode_message(out.message));
    if (out.target) {
      auto it = sessions_.find(*out.target);
      if (it == sessions_.end()) return;
      if (auto s = it->second.lock()) s->send(frame, droppable);
      return;
    }
    for (auto& [_, weak] : sessions_) {
      if (auto s = weak.lock()) s->send(frame, droppable);
    }
  }

  asio::io_context& io_;
  LiveSimulation& live_;
  ServerOptions options_;
  tcp::acceptor acceptor_;
  mutable std::mutex mutex_;
  std::map<ClientId, std::weak_ptr<WsSession>> sessions_;
  std::atomic<ClientId> next_id_{1};
};

template <class Body, class Allocator>
void WsSession::start(http::request<Body, http::basic_fields<Allocator>> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.text(true);
  ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
}

inline void WsSession::on_accept(beast::error_code ec) {
  if (ec) return;
  server_.add(shared_from_this());
  enqueue(std::make_shared<const std::string>(encode_message(server_.live().hello())), false);
  enqueue(std::make_shared<const std::string>(encode_message(SnapshotMsg{server_.live().snapshot()})), false);
  do_read();
}

inline void WsSession::do_read() {
  ws_.async_read(read_buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
}

inline void WsSession::on_read(beast::error_code ec, std::size_t) {
  if (ec) {
    server_.remove(id_);
    return;
  }
  pending_ += beast::buffers_to_string(read_buffer_.data());
  read_buffer_.consume(read_buffer_.size());
  // A message without a trailing newline is still one whole frame.
  if (!pending_.empty() && pending_.back() != '\n') pending_ += '\n';
  for (const auto& frame : split_frames(pending_)) handle_frame(frame);
  do_read();
}

inline void WsSession::handle_frame(const std::string& frame) {
  Message reply;
  try {
    const auto msg = decode_message(frame);
    if (const auto* cmd = std::get_if<CommandMsg>(&msg)) {
      reply = server_.live().submit(cmd->command, id_);
    } else {
      reply = ErrorMsg{std::string(to_string(ErrorCode::MalformedMessage)), "expected a command frame", std::nullopt};
    }
  } catch (const Error& e) {
    reply = ErrorMsg{std::string(to_string(e.code())), e.what(), std::nullopt};
  }
  enqueue(std::make_shared<const std::string>(encode_message(reply)), false);
}

inline void WsSession::enqueue(std::shared_ptr<const std::string> frame, bool droppable) {
  if (closing_) return;
  if (droppable && outbox_.size() >= server_.options().max_queued_frames) return;
  outbox_.push_back(std::move(frame));
  if (!writing_) do_write();
}

inline void WsSession::do_write() {
  if (outbox_.empty()) {
    writing_ = false;
    return;
  }
  writing_ = true;
  ws_.async_write(asio::buffer(*outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->writing_ = false;
      self->outbox_.clear();
      self->server_.remove(self->id_);
      return;
    }
    self->outbox_.pop_front();
    self->do_write();
  });
}

inline void HttpSession::on_read(beast::error_code ec) {
  if (ec) return;
  auto req = parser_->release();
  if (websocket::is_upgrade(req)) {
    beast::get_lowest_layer(stream_).expires_never();
    std::make_shared<WsSession>(stream_.release_socket(), server_, server_.next_id())->start(std::move(req));
    return;
  }
  response_ = std::make_shared<http::response<http::string_body>>(respond(req));
  const bool keep_alive = response_->keep_alive();
  http::async_write(stream_, *response_,
                    [self = shared_from_this(), keep_alive](beast::error_code write_ec, std::size_t) {
                      if (write_ec) return;
                      if (keep_alive) {
                        self->do_read();
                      } else {
                        beast::error_code ignored;
                        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                      }
                    });
}

inline http::response<http::string_body> HttpSession::respond(const http::request<http::string_body>& req) const {
  auto make = [&](http::status status, std::string type, std::string body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::server, "episim");
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };
  if (req.method() != http::verb::get) {
    return make(http::status::method_not_allowed, "text/plain", "method not allowed\n");
  }
  std::string target(req.target());
  if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
  if (target == "/metrics.csv") return make(http::status::ok, "text/csv", export_csv(server_.live_.series()));
  if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
    return make(http::status::bad_request, "text/plain", "bad path\n");
  }
  if (target == "/") target = "/index.html";

  const auto& root = server_.options_.ui_dir;
  if (!root.empty()) {
    const auto path = root / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (in && std::filesystem::is_regular_file(path)) {
      std::ostringstream body;
      body << in.rdbuf();
      return make(http::status::ok, detail::mime_type(path), body.str());
    }
  }
  if (target == "/index.html") return make(http::status::ok, "text/html; charset=utf-8", detail::kPlaceholderPage);
  return make(http::status::not_found, "text/plain", "not found\n");
}

}  // namespace episim::net
