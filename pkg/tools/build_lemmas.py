"""Regenerate ``src/sigtype/nlp/data/lemmas.tsv``.

The table is produced from a hand-kept list of base words (verbs and nouns
common in code comments) expanded with regular English inflection rules,
plus a table of irregular forms. Run from the repository root::

    python tools/build_lemmas.py
"""
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "sigtype" / "nlp" / "data"

# Verbs whose final consonant doubles before -ed/-ing.
DOUBLING = {
    "stop", "drop", "skip", "map", "wrap", "strip", "split", "set", "get",
    "put", "run", "begin", "commit", "submit", "omit", "emit", "permit",
    "plan", "scan", "ship", "tag", "log", "flag", "plot", "zip", "trim",
    "pad", "swap", "step", "snap", "chop", "cut", "hit", "admit", "refer",
    "prefer", "occur", "transfer", "control", "debug", "shut", "dim",
    "sit", "spin", "stub", "grab", "drag", "nest", "unwrap", "remap",
    "reset", "rerun", "upset", "fit", "knit", "quit",
}

VERBS = """
accept access accumulate add adjust aggregate align allocate allow append
apply approve archive argue arrange assert assign attach attempt authenticate
authorize avoid backup bind block boot break broadcast build cache calculate
call cancel capture cast catch change check choose clean clear clip clone close
collect combine commit compare compile complete compress compute concatenate
configure confirm connect consume contain continue control convert copy count
create crop cut debug decide declare decode decorate decrease decrypt define
delete deliver depend deploy derive describe deserialize destroy detach detect
determine dim disable discard disconnect dispatch display divide download drag
draw drop dump edit emit enable encode encrypt end ensure enter evaluate
exclude execute exist exit expand expect expire export expose extend extract
fail fetch fill filter find finish fit fix flag flatten flush fold follow force
format forward freeze generate get grab group guess handle hash hide hit hold
ignore implement import include increase increment indent index infer inherit
initialize insert inspect install interpret invalidate invoke iterate join
keep kill label launch limit link list listen load locate lock log lookup loop
make manage map mark match measure merge migrate mock modify monitor move
multiply name navigate need nest normalize notify observe obtain occur offer
omit open optimize order output override own pad paginate parse pass patch
pause perform permit pick ping place plan play plot point poll populate post
predict prefer prepare preserve prevent print process produce provide publish
pull purge push put query queue quit raise rank read receive record reduce
refer refresh register reject release reload remain remap remove rename render
reorder repeat replace reply report represent request require rerun reserve
reset resize resolve respond restart restore restrict retrieve retry return
reuse reverse rotate round route run sample save scale scan schedule score
search select send separate serialize serve set share shift ship show shuffle
shut sign simulate sit skip sleep slice snap sort spawn specify spin split
start step stop store stream strip stub submit subscribe subtract succeed
suggest supply support swap switch sync tag test throw tick timeout toggle
tokenize track train transfer transform translate traverse trigger trim truncate
try tune turn type unlink unlock unpack unwrap update upgrade upload use
validate verify view visit wait walk want warn watch work wrap write yield zip
""".split()

NOUNS = """
account action address agent algorithm alias angle answer api app argument
array artifact asset attribute author axis backend bar base batch bit block
blob body book boolean border bound box branch browser buffer bug bundle
button byte cache callback candidate canvas cell channel char character chunk
class client cluster code coefficient collection column command comment
commit component condition config connection constant constraint container
content context control coordinate core count counter credential cursor
customer dataset database date day default delay delta dependency depth
descriptor detail device dict dictionary difference digit dimension directory
document domain edge element email encoding end endpoint entity entry
environment epoch error event example exception expression extension factor
feature field figure file filename filter flag float folder font format frame
function gradient graph group handler hash header height hook host hour id
identifier image index input instance integer interval item iteration job key
keyword kind label language layer length level library limit line link list
literal loader location lock log loop manager mapping mask match matrix
member message metadata method metric minute model module month name namespace
neighbor network node note number object offset operation operator option
order output owner package page pair panel parameter parent parser part
partition password patch path pattern payload peer permission pixel plugin
point pointer policy pool port position post prefix probability process
product profile program project property protocol provider proxy query queue
range rank rate ratio reader reason record reference region registry release
report repository request resource response result role root route row rule
sample scale schema scope score second section segment selector sequence server
service session setting shape signal size slot socket source span spec state
statement status step stream string style subject suffix symbol table tag task
template tensor term test text thread threshold tile time timeout timestamp
title token tool total transaction tree trigger tuple type unit url user value
variable vector version vertex view visitor weight widget width window word
worker year zone
""".split()

IRREGULAR = {
    # verbs
    "began": "begin", "begun": "begin", "bound": "bind", "broke": "break",
    "broken": "break", "built": "build", "caught": "catch", "chose": "choose",
    "chosen": "choose", "came": "come", "comes": "come", "coming": "come",
    "drew": "draw", "drawn": "draw", "found": "find", "froze": "freeze",
    "frozen": "freeze", "gave": "give", "given": "give", "gives": "give",
    "giving": "give", "got": "get", "gotten": "get", "went": "go",
    "gone": "go", "goes": "go", "going": "go", "held": "hold", "hidden": "hide",
    "hid": "hide", "kept": "keep", "knew": "know", "known": "know",
    "knows": "know", "knowing": "know", "led": "lead", "leads": "lead",
    "leading": "lead",
    "lost": "lose", "loses": "lose", "losing": "lose", "made": "make",
    "meant": "mean", "means": "mean", "meaning": "mean", "paid": "pay",
    "ran": "run", "read": "read", "said": "say", "says": "say", "saw": "see",
    "seen": "see", "sees": "see", "seeing": "see", "sent": "send", "shown": "show",
    "shrank": "shrink", "shrunk": "shrink", "sold": "sell", "spent": "spend",
    "split": "split", "spun": "spin", "stood": "stand", "took": "take",
    "taken": "take", "takes": "take", "taking": "take", "thought": "think",
    "threw": "throw", "thrown": "throw", "told": "tell", "understood": "understand",
    "wrote": "write", "written": "write", "became": "become", "becomes": "become",
    "becoming": "become", "brought": "bring", "brings": "bring",
    "fed": "feed", "feeds": "feed", "felt": "feel", "fell": "fall", "fallen": "fall",
    "falls": "fall", "forgot": "forget", "forgotten": "forget", "grew": "grow",
    "grown": "grow", "grows": "grow", "overrode": "override", "overridden": "override",
    "rewrote": "rewrite", "rewritten": "rewrite", "rebuilt": "rebuild",
    "sat": "sit", "slept": "sleep", "spoke": "speak", "spoken": "speak",
    "struck": "strike", "swept": "sweep", "tore": "tear", "torn": "tear",
    "woke": "wake", "won": "win", "wound": "wind", "dealt": "deal",
    "undid": "undo", "undone": "undo", "redid": "redo", "redone": "redo",
    # nouns
    "children": "child", "people": "person", "men": "man", "women": "woman",
    "feet": "foot", "teeth": "tooth", "mice": "mouse", "geese": "goose",
    "indices": "index", "vertices": "vertex", "matrices": "matrix",
    "axes": "axis", "analyses": "analysis", "bases": "base", "crises": "crisis",
    "hypotheses": "hypothesis", "theses": "thesis", "criteria": "criterion",
    "phenomena": "phenomenon", "halves": "half",
    "lives": "life", "knives": "knife", "wives": "wife", "selves": "self",
    "shelves": "shelf", "wolves": "wolf", "appendices": "appendix",
    "suffixes": "suffix", "prefixes": "prefix", "radii": "radius",
    "statuses": "status", "aliases": "alias", "biases": "bias",
    "classes": "class", "processes": "process", "addresses": "address",
    "boxes": "box", "buses": "bus", "passes": "pass",
    # comparatives and superlatives of frequent adjectives
    "better": "good", "best": "good", "worse": "bad", "worst": "bad",
    "larger": "large", "largest": "large", "smaller": "small", "smallest": "small",
    "bigger": "big", "biggest": "big", "longer": "long", "longest": "long",
    "shorter": "short", "shortest": "short", "higher": "high", "highest": "high",
    "lower": "low", "lowest": "low", "greater": "great", "greatest": "great",
    "newer": "new", "newest": "new", "older": "old", "oldest": "old",
    "earlier": "early", "earliest": "early", "later": "late", "latest": "late",
    "faster": "fast", "fastest": "fast", "easier": "easy", "easiest": "easy",
}

VOWELS = set("aeiou")


def third_person(word):
    if word.endswith(("s", "x", "z", "ch", "sh")):
        return word + "es"
    if word.endswith("y") and len(word) > 1 and word[-2] not in VOWELS:
        return word[:-1] + "ies"
    return word + "s"


def past(word):
    if word.endswith("e"):
        return word + "d"
    if word.endswith("y") and word[-2] not in VOWELS:
        return word[:-1] + "ied"
    if word in DOUBLING:
        return word + word[-1] + "ed"
    return word + "ed"


def gerund(word):
    if word.endswith("ie"):
        return word[:-2] + "ying"
    if word.endswith("e") and not word.endswith(("ee", "ye", "oe")):
        return word[:-1] + "ing"
    if word in DOUBLING:
        return word + word[-1] + "ing"
    return word + "ing"


def build():
    stopwords = set((DATA / "stopwords.txt").read_text().split())
    bases = set(VERBS) | set(NOUNS)
    table = {}

    def add(form, lemma):
        # Bases stay fixpoints; stopwords are never rewritten.
        if form in bases or form in stopwords or form == lemma:
            return
        table.setdefault(form, lemma)

    for verb in VERBS:
        if verb in DOUBLING and verb.endswith(("set", "put", "cut", "hit", "shut", "split", "quit")):
            past_form = verb
        else:
            past_form = past(verb)
        for form in (third_person(verb), past_form, gerund(verb)):
            add(form, verb)
    for noun in NOUNS:
        add(third_person(noun), noun)
    for form, lemma in IRREGULAR.items():
        if form in bases or form in stopwords or lemma in stopwords:
            continue
        table[form] = lemma

    # A lemma must not itself be rewritten.
    for form in list(table):
        if table[form] in table:
            table[form] = table[table[form]]
    lines = [f"{form}\t{lemma}" for form, lemma in sorted(table.items())]
    (DATA / "lemmas.tsv").write_text("\n".join(lines) + "\n")
    return len(lines)


if __name__ == "__main__":
    print(build(), "entries written")
