"""Word lists backing the readability rubric and the fallback sentiment annotator.

These lists are deliberately small and shipped with the package so scoring is
deterministic and needs no external corpora. The rubric dictionary is the
union of COMMON_WORDS and JARGON_WORDS (jargon terms are real words and count
as dictionary hits).
"""

COMMON_WORDS = frozenset("""
a about after again against all also am an and any are as at back bad be
because been before best better big but by call came can cat come could day
did do dog does down each even every fan feel few find first for fox from fun
game gave get give go goal good got great had has have he her here him his
home house how i if in into is it its just know last left like little long
look lot made make man many match may me more most much my near new next no
not now of off old on one only or other our out over own people play played
player point put quick ran red right run said saw say score season see she
show small so some still such take team than that the their them then there
these they thing think this time to today too top two up us use very want was
watch way we well went were what when where which who will win with won work
world would year you your brown jumps lazy happy seven children walked slowly
sleeping animal news vote city win loss fans coach final round star movie song
film show stage band space star light water air earth sun moon test study
result found tell told ask asked read write run runs running go going gone
amplify really truly
""".split())

JARGON_WORDS = frozenset("""
macroprudential liquidity covenants covenant systemic leverage amortization
arbitrage basis collateral derivative derivatives duration hedging solvency
stochastic heteroskedastic eigenvalue eigenvector gradient regularization
convolutional transformer tokenization embedding embeddings quantization
bayesian posterior likelihood heuristic asymptotic polynomial combinatorial
cryptographic idempotent monotonic orthogonal covariance kurtosis
pharmacokinetics immunoassay cardiovascular pathophysiology epidemiology
jurisprudence tort indemnification fiduciary statutory subrogation
thermodynamic entropy enthalpy catalysis electrophoresis spectroscopy
microservices observability telemetry
""".split())

DICTIONARY_WORDS = COMMON_WORDS | JARGON_WORDS

POSITIVE_WORDS = frozenset("""
good great love loved awesome amazing excellent fantastic wonderful best fun
enjoy enjoyed happy nice brilliant superb beautiful win winning impressive
""".split())

NEGATIVE_WORDS = frozenset("""
bad terrible awful hate hated worst boring horrible poor sad angry ugly
disappointing disappointed annoying broken waste lose losing fail failed
""".split())
