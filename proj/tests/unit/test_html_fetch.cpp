#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "chronoweave/errors.hpp"
#include "chronoweave/fetch.hpp"
#include "chronoweave/html_extract.hpp"

using namespace chronoweave;

namespace {

RawDocument doc(std::string html) {
    RawDocument raw;
    raw.url = "https://example.com/page";
    raw.content_type = "text/html";
    raw.bytes = std::move(html);
    raw.retrieved_at = 0;
    return raw;
}

const std::string kLongPara =
    "This paragraph is comfortably longer than forty characters so it stays in the body.";
const std::string kLongPara2 =
    "A second paragraph that also clears the forty character threshold with room to spare.";

}  // namespace

TEST_CASE("extract_main_text prefers <title> and joins long paragraphs") {
    auto extracted =
        extract_main_text(doc("<html><head><title>A</title></head><body><p>" + kLongPara + "</p><p>" + kLongPara2 +
                              "</p></body></html>"));
    CHECK(extracted.title == "A");
    CHECK(extracted.body == kLongPara + "\n\n" + kLongPara2);
}

TEST_CASE("extract_main_text falls back to the first <h1>") {
    auto extracted = extract_main_text(doc("<html><body><h1>B</h1><p>" + kLongPara + "</p></body></html>"));
    CHECK(extracted.title == "B");
}

TEST_CASE("short paragraphs are boilerplate") {
    auto extracted = extract_main_text(doc("<html><title>T</title><p>short</p><p>also short</p></html>"));
    CHECK(extracted.body.empty());
}

TEST_CASE("no title candidate is an extraction error") {
    CHECK_THROWS_AS(extract_main_text(doc("<html><body><p>" + kLongPara + "</p></body></html>")), ExtractionError);
}

TEST_CASE("a declared non-HTML content type is rejected") {
    RawDocument raw;
    raw.url = "https://example.com/feed";
    raw.content_type = "application/json";
    raw.bytes = "{}";
    CHECK_THROWS_AS(extract_main_text(raw), ExtractionError);
    // No declared type: parse on a best-effort basis.
    raw.content_type = "";
    raw.bytes = "<title>T</title>";
    CHECK(extract_main_text(raw).title == "T");
}

TEST_CASE("inline markup, entities and script content") {
    auto extracted = extract_main_text(
        doc("<html><title>Q &amp; A &#8212; today</title><script>var x = '<p>no</p>';</script><body><p>Markets "
            "&amp; <b>makers</b> rallied while regulators watched from the sidelines today.</p></body></html>"));
    CHECK(extracted.title == "Q & A \xe2\x80\x94 today");
    CHECK(extracted.body ==
          "Markets & makers rallied while regulators watched from the sidelines today.");
}

TEST_CASE("unclosed <p> is flushed by the next block tag") {
    auto extracted = extract_main_text(
        doc("<title>T</title><p>" + kLongPara + "<div>ignored</div><p>" + kLongPara2 + "</p>"));
    CHECK(extracted.body == kLongPara + "\n\n" + kLongPara2);
}

TEST_CASE("fetch_article against a local stub server") {
    httplib::Server server;
    std::atomic<int> redirect_hits{0};
    server.Get("/ok", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><title>ok</title></html>", "text/html");
    });
    server.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    server.Get("/hop", [&](const httplib::Request& req, httplib::Response& res) {
        int n = std::stoi(req.get_param_value("n"));
        ++redirect_hits;
        if (n <= 0) {
            res.set_content("landed", "text/plain");
        } else {
            res.status = 302;
            res.set_header("Location", "/hop?n=" + std::to_string(n - 1));
        }
    });

    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    std::string base = "http://127.0.0.1:" + std::to_string(port);

    SUBCASE("200 passes bytes and content type through") {
        RawDocument raw = fetch_article(base + "/ok");
        CHECK(raw.bytes == "<html><title>ok</title></html>");
        CHECK(raw.content_type.find("text/html") != std::string::npos);
        CHECK(raw.url == base + "/ok");
    }
    SUBCASE("404 raises a fetch error carrying the status") {
        try {
            fetch_article(base + "/missing");
            FAIL("expected FetchError");
        } catch (const FetchError& e) {
            CHECK(e.status() == 404);
        }
    }
    SUBCASE("five redirects are followed") {
        RawDocument raw = fetch_article(base + "/hop?n=5");
        CHECK(raw.bytes == "landed");
    }
    SUBCASE("six redirects exceed the cap") {
        CHECK_THROWS_AS(fetch_article(base + "/hop?n=6"), RedirectError);
    }
    SUBCASE("connection refused is a fetch error") {
        CHECK_THROWS_AS(fetch_article("http://127.0.0.1:1/nothing", FetchOptions{.timeout_ms = 2000}),
                        FetchError);
    }

    server.stop();
    server_thread.join();
}
