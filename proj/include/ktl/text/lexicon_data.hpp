#pragma once

// Bundled lexicon resources; kept byte-identical to resources/*.txt.

#include <string_view>

namespace ktl::text::bundled {

inline constexpr std::string_view kStopwords = R"lex(# Function words: chunk boundaries that are never part of a concept.
a
about
above
after
again
against
all
also
am
an
and
any
are
as
at
be
because
been
before
being
below
between
both
but
by
can
could
did
do
does
doing
down
during
each
either
few
for
from
further
had
has
have
having
he
her
here
hers
herself
him
himself
his
how
i
if
in
into
is
it
its
itself
just
may
me
might
more
most
much
must
my
myself
neither
no
nor
not
of
off
on
once
only
or
other
our
ours
ourselves
out
over
own
same
shall
she
should
so
some
such
than
that
the
their
theirs
them
themselves
then
there
these
they
this
those
through
to
too
under
until
up
very
was
we
were
what
when
where
which
while
who
whom
whose
why
will
with
would
you
your
yours
yourself
yourselves
's
)lex";

inline constexpr std::string_view kVerbs = R"lex(# Verb lexicon (base forms). Inflections (-s/-es, -ed/-d, -ing) are
# derived automatically. Each verb is emitted as a one-token chunk and
# splits the surrounding content span.
absorb
affect
allow
become
bring
carry
cause
change
collect
come
consume
contain
convert
create
decrease
depend
destroy
develop
evaporate
find
flow
form
freeze
get
give
go
grow
help
include
increase
keep
know
lead
learn
leave
let
make
melt
move
need
occur
produce
protect
provide
put
reach
receive
reduce
reflect
regulate
release
remain
require
result
rise
run
say
see
seem
show
spread
start
stay
store
support
take
tell
think
transfer
transform
travel
turn
want
)lex";

inline constexpr std::string_view kWhRules = R"lex(# Question-to-hypothesis rules: <pattern> ||| <template>
# A pattern is a sequence of leading words; "*" matches any single word,
# captured in order as {1}, {2}, ... {rest} is the remaining question text
# (terminal "?" removed) and {option} is the answer option.
# The longest matching pattern wins; among equal lengths, file order.
what is ||| {rest} is {option}
what are ||| {rest} are {option}
what was ||| {rest} was {option}
what were ||| {rest} were {option}
what do ||| {rest} {option}
what does ||| {rest} {option}
what did ||| {rest} {option}
what ||| {option} {rest}
which is ||| {rest} is {option}
which are ||| {rest} are {option}
which of these ||| {option} {rest}
which * ||| {option} {rest}
which ||| {option} {rest}
who is ||| {rest} is {option}
who are ||| {rest} are {option}
who ||| {option} {rest}
where is ||| {rest} is in {option}
where are ||| {rest} are in {option}
where do ||| {rest} in {option}
where does ||| {rest} in {option}
where ||| {rest} in {option}
when is ||| {rest} is in {option}
when do ||| {rest} in {option}
when does ||| {rest} in {option}
when ||| {rest} in {option}
why do ||| {rest} because {option}
why does ||| {rest} because {option}
why ||| {rest} because {option}
how is * ||| {1} is {rest} {option}
how are * ||| {1} are {rest} {option}
how do ||| {rest} by {option}
how does ||| {rest} by {option}
how ||| {rest} by {option}
)lex";

}  // namespace ktl::text::bundled
