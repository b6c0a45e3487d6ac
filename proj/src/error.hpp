#pragma once

#include <stdexcept>
#include <string>

namespace tfpr
{
    /// Failure categories; mirrored one-to-one by the C status codes.
    enum class ErrorKind
    {
        InvalidArgument,
        Dimension,
        NotAFrame,
        Io,
        Format,
        Numerical,
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), m_kind(kind) {}

        ErrorKind kind() const noexcept { return m_kind; }

    private:
        ErrorKind m_kind;
    };

    [[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
    {
        throw Error(kind, what);
    }

    inline void require(bool condition, ErrorKind kind, const std::string& what)
    {
        if (!condition)
            fail(kind, what);
    }
}  // namespace tfpr
