#include <cmath>
#include <memory>
#include <utility>

#include <httplib.h>

#include "objedit/backends.hpp"
#include "objedit/error.hpp"
#include "objedit/llmproto.hpp"

namespace objedit::backends {

namespace {

class HttpChannel {
  public:
    explicit HttpChannel(const BackendChoice& c) : client_(c.url), url_(c.url) {
        if (c.url.empty())
            throw Error(ErrorCode::ConfigError, "http backend needs a url");
        time_t sec = time_t(c.timeout_s);
        long usec = long((c.timeout_s - double(sec)) * 1e6);
        client_.set_connection_timeout(sec, usec);
        client_.set_read_timeout(sec, usec);
        client_.set_write_timeout(sec, usec);
    }

    std::string post(const char* route, const std::string& body) {
        httplib::Result res = client_.Post(route, body, "application/json");
        if (!res)
            throw Error(ErrorCode::BackendUnreachable,
                        std::string("POST ") + url_ + route + " failed: " +
                            httplib::to_string(res.error()));
        if (res->status != 200)
            throw Error(ErrorCode::BackendUnreachable,
                        std::string("POST ") + url_ + route + " returned status " +
                            std::to_string(res->status));
        return res->body;
    }

  private:
    httplib::Client client_;
    std::string url_;
};

std::string template_text(const BackendChoice& c, bool grounding) {
    if (!c.template_path.empty()) return llmproto::load_template_file(c.template_path);
    return grounding ? llmproto::grounding_prompt_template()
                     : llmproto::reasoner_prompt_template();
}

class HttpGrounder final : public Grounder {
  public:
    explicit HttpGrounder(const BackendChoice& c)
        : channel_(c), template_(template_text(c, true)) {}

    llmproto::SceneDescription ground(const GroundContext& ctx) override {
        if (!ctx.image) throw Error(ErrorCode::ConfigError, "http grounder needs the image");
        std::string prompt = llmproto::make_grounding_prompt(template_, ctx.class_names,
                                                             ctx.image->width, ctx.image->height);
        std::string body = channel_.post(kGroundRoute,
                                         make_ground_request(*ctx.image, prompt));
        return llmproto::parse_grounding_reply(parse_text_response(body), ctx.image->width,
                                               ctx.image->height);
    }

  private:
    HttpChannel channel_;
    std::string template_;
};

class HttpRefiner final : public Refiner {
  public:
    explicit HttpRefiner(const BackendChoice& c) : channel_(c) {}

    std::vector<RefinedObject> refine(const RefineContext& ctx) override {
        if (!ctx.image) throw Error(ErrorCode::ConfigError, "http refiner needs the image");
        std::string body =
            channel_.post(kRefineRoute, make_refine_request(*ctx.image, ctx.detections));
        return parse_refine_response(body);
    }

  private:
    HttpChannel channel_;
};

bool is_reply_parse_error(const Error& e) {
    switch (e.code()) {
        case ErrorCode::MalformedReply:
        case ErrorCode::MissingMatrixTokens:
        case ErrorCode::MissingIdTokens:
        case ErrorCode::WrongNumberCount:
        case ErrorCode::BadBottomRow:
        case ErrorCode::BadId:
            return true;
        default:
            return false;
    }
}

class HttpReasoner final : public Reasoner {
  public:
    explicit HttpReasoner(const BackendChoice& c)
        : channel_(c), template_(template_text(c, false)), max_retries_(c.max_retries) {}

    ReasonResult reason(const ReasonContext& ctx) override {
        std::string prompt = llmproto::make_reasoner_prompt(
            template_, ctx.instruction, ctx.candidates, ctx.image_width, ctx.image_height);
        std::string request = make_reason_request(prompt);

        std::vector<std::string> warnings;
        for (int attempt = 0;; ++attempt) {
            std::string body = channel_.post(kReasonRoute, request);
            try {
                llmproto::ReasonerReply reply =
                    llmproto::parse_reasoner_reply(parse_text_response(body));
                warnings.insert(warnings.end(), reply.warnings.begin(), reply.warnings.end());
                return {reply.transform, reply.object_id, std::move(warnings)};
            } catch (const Error& e) {
                if (!is_reply_parse_error(e) || attempt >= max_retries_) throw;
                warnings.push_back("attempt " + std::to_string(attempt + 1) +
                                   " gave an unusable reply (" + std::string(e.what()) +
                                   "); asking again");
            }
        }
    }

  private:
    HttpChannel channel_;
    std::string template_;
    int max_retries_;
};

class HttpDrawer final : public Drawer {
  public:
    explicit HttpDrawer(const BackendChoice& c) : channel_(c), refine_(c.refine) {}

    EditedImage draw(const DrawContext& ctx) override {
        if (!ctx.image || !ctx.before || !ctx.after)
            throw Error(ErrorCode::ConfigError, "http drawer needs image and both masks");
        std::string body = channel_.post(
            kDrawRoute, make_draw_request(*ctx.image, *ctx.before, *ctx.after,
                                          ctx.background_prompt, ctx.generation_prompt,
                                          refine_ || ctx.refine));
        return {parse_draw_response(body), *ctx.after};
    }

  private:
    HttpChannel channel_;
    bool refine_;
};

}  // namespace

std::unique_ptr<Grounder> make_http_grounder(const BackendChoice& c) {
    return std::make_unique<HttpGrounder>(c);
}

std::unique_ptr<Refiner> make_http_refiner(const BackendChoice& c) {
    return std::make_unique<HttpRefiner>(c);
}

std::unique_ptr<Reasoner> make_http_reasoner(const BackendChoice& c) {
    return std::make_unique<HttpReasoner>(c);
}

std::unique_ptr<Drawer> make_http_drawer(const BackendChoice& c) {
    return std::make_unique<HttpDrawer>(c);
}

}  // namespace objedit::backends
