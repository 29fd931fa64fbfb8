// bundled_data.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// \file
// Generated by tools/embed_bundled_data.py. Do not edit.

#ifndef FLUENTQA_BUNDLED_DATA_HPP_
#define FLUENTQA_BUNDLED_DATA_HPP_

#include <string_view>

namespace fluentqa::bundled {

// data/irregular_verbs.tsv
inline constexpr std::string_view kIrregularVerbsTsv = R"fqa(# lemma	past	past_participle	third_singular
arise	arose	arisen	arises
awake	awoke	awoken	awakes
be	was	been	is
bear	bore	borne	bears
beat	beat	beaten	beats
become	became	become	becomes
befall	befell	befallen	befalls
beget	begot	begotten	begets
begin	began	begun	begins
behold	beheld	beheld	beholds
bend	bent	bent	bends
beset	beset	beset	besets
bet	bet	bet	bets
bid	bid	bid	bids
bind	bound	bound	binds
bite	bit	bitten	bites
bleed	bled	bled	bleeds
blow	blew	blown	blows
break	broke	broken	breaks
breed	bred	bred	breeds
bring	brought	brought	brings
broadcast	broadcast	broadcast	broadcasts
build	built	built	builds
burn	burnt	burnt	burns
burst	burst	burst	bursts
buy	bought	bought	buys
cast	cast	cast	casts
catch	caught	caught	catches
choose	chose	chosen	chooses
cling	clung	clung	clings
come	came	come	comes
cost	cost	cost	costs
creep	crept	crept	creeps
cut	cut	cut	cuts
deal	dealt	dealt	deals
dig	dug	dug	digs
do	did	done	does
draw	drew	drawn	draws
dream	dreamt	dreamt	dreams
drink	drank	drunk	drinks
drive	drove	driven	drives
dwell	dwelt	dwelt	dwells
eat	ate	eaten	eats
fall	fell	fallen	falls
feed	fed	fed	feeds
feel	felt	felt	feels
fight	fought	fought	fights
find	found	found	finds
flee	fled	fled	flees
fling	flung	flung	flings
fly	flew	flown	flies
forbid	forbade	forbidden	forbids
forecast	forecast	forecast	forecasts
foresee	foresaw	foreseen	foresees
foretell	foretold	foretold	foretells
forget	forgot	forgotten	forgets
forgive	forgave	forgiven	forgives
forgo	forwent	forgone	forgoes
forsake	forsook	forsaken	forsakes
freeze	froze	frozen	freezes
get	got	gotten	gets
give	gave	given	gives
go	went	gone	goes
grind	ground	ground	grinds
grow	grew	grown	grows
hang	hung	hung	hangs
have	had	had	has
hear	heard	heard	hears
hide	hid	hidden	hides
hit	hit	hit	hits
hold	held	held	holds
hurt	hurt	hurt	hurts
keep	kept	kept	keeps
kneel	knelt	knelt	kneels
know	knew	known	knows
lay	laid	laid	lays
lead	led	led	leads
lean	leant	leant	leans
leap	leapt	leapt	leaps
learn	learnt	learnt	learns
leave	left	left	leaves
lend	lent	lent	lends
let	let	let	lets
lie	lay	lain	lies
light	lit	lit	lights
lose	lost	lost	loses
make	made	made	makes
mean	meant	meant	means
meet	met	met	meets
mislead	misled	misled	misleads
misread	misread	misread	misreads
mistake	mistook	mistaken	mistakes
misunderstand	misunderstood	misunderstood	misunderstands
offset	offset	offset	offsets
outbid	outbid	outbid	outbids
outdo	outdid	outdone	outdoes
outgrow	outgrew	outgrown	outgrows
overcome	overcame	overcome	overcomes
overdo	overdid	overdone	overdoes
overfeed	overfed	overfed	overfeeds
overhear	overheard	overheard	overhears
override	overrode	overridden	overrides
overrun	overran	overrun	overruns
oversee	oversaw	overseen	oversees
overtake	overtook	overtaken	overtakes
overthrow	overthrew	overthrown	overthrows
partake	partook	partaken	partakes
pay	paid	paid	pays
prove	proved	proven	proves
put	put	put	puts
quit	quit	quit	quits
read	read	read	reads
rebuild	rebuilt	rebuilt	rebuilds
redo	redid	redone	redoes
rend	rent	rent	rends
repay	repaid	repaid	repays
rethink	rethought	rethought	rethinks
rewrite	rewrote	rewritten	rewrites
rid	rid	rid	rids
ride	rode	ridden	rides
ring	rang	rung	rings
rise	rose	risen	rises
run	ran	run	runs
saw	sawed	sawn	saws
say	said	said	says
see	saw	seen	sees
seek	sought	sought	seeks
sell	sold	sold	sells
send	sent	sent	sends
set	set	set	sets
sew	sewed	sewn	sews
shake	shook	shaken	shakes
shear	sheared	shorn	shears
shed	shed	shed	sheds
shine	shone	shone	shines
shoot	shot	shot	shoots
show	showed	shown	shows
shrink	shrank	shrunk	shrinks
shut	shut	shut	shuts
sing	sang	sung	sings
sink	sank	sunk	sinks
sit	sat	sat	sits
slay	slew	slain	slays
sleep	slept	slept	sleeps
slide	slid	slid	slides
sling	slung	slung	slings
slit	slit	slit	slits
smell	smelt	smelt	smells
sow	sowed	sown	sows
speak	spoke	spoken	speaks
speed	sped	sped	speeds
spell	spelt	spelt	spells
spend	spent	spent	spends
spill	spilt	spilt	spills
spin	spun	spun	spins
spit	spat	spat	spits
split	split	split	splits
spoil	spoilt	spoilt	spoils
spread	spread	spread	spreads
spring	sprang	sprung	springs
stand	stood	stood	stands
steal	stole	stolen	steals
stick	stuck	stuck	sticks
sting	stung	stung	stings
stink	stank	stunk	stinks
stride	strode	stridden	strides
strike	struck	struck	strikes
string	strung	strung	strings
strive	strove	striven	strives
swear	swore	sworn	swears
sweep	swept	swept	sweeps
swell	swelled	swollen	swells
swim	swam	swum	swims
swing	swung	swung	swings
take	took	taken	takes
teach	taught	taught	teaches
tear	tore	torn	tears
tell	told	told	tells
think	thought	thought	thinks
throw	threw	thrown	throws
thrust	thrust	thrust	thrusts
tread	trod	trodden	treads
undergo	underwent	undergone	undergoes
understand	understood	understood	understands
undertake	undertook	undertaken	undertakes
undo	undid	undone	undoes
unwind	unwound	unwound	unwinds
upset	upset	upset	upsets
wake	woke	woken	wakes
wear	wore	worn	wears
weave	wove	woven	weaves
weep	wept	wept	weeps
wet	wet	wet	wets
win	won	won	wins
wind	wound	wound	winds
withdraw	withdrew	withdrawn	withdraws
withhold	withheld	withheld	withholds
withstand	withstood	withstood	withstands
wring	wrung	wrung	wrings
write	wrote	written	writes
)fqa";

// data/st_rules.txt
inline constexpr std::string_view kStRules = R"fqa(# Syntactic transformation rules for turning a WH-question parse into
# declarative response skeletons.
#
# Each rule pairs a tree pattern with a surgery script. The script must leave
# a node named "answer"; the generator replaces it with the answer phrase and
# its preposition/determiner variants. Capture names with a fixed meaning:
#
#   subj   subject phrase, swapped with pronouns
#   verb   main verb, re-inflected when "aux" is do/does/did/will
#   aux    fronted auxiliary; "when aux ..." restricts which words fire
#
# Every rule that matches contributes candidates, in file order.
# Sentence-final punctuation is removed before matching.

version 1

# what year did the Netherlands rise up against Philip II
#   -> the Netherlands rose up against Philip II <answer>
rule do-support
when aux do does did will 'll
match SBARQ=q < /^WH/=wh < (SQ=sq < (/^(VB|MD)/=aux $+ NP=subj) < (VP=vp < /^VB/=verb))
delete wh
delete aux
insert (ANS=answer *) >-1 vp
excise sq
relabel q S
end

# what can a cat eat -> a cat can eat <answer>
rule modal
when aux would can could must may should might shall
match SBARQ=q < /^WH/=wh < (SQ=sq < (/^(VB|MD)/=aux $+ NP=subj) < (VP=vp < /^VB/=verb))
delete wh
move aux $+ verb
insert (ANS=answer *) >-1 vp
excise sq
relabel q S
end

# where was Chopin born -> Chopin was born <answer>
rule be-have-verb
when aux is 's are 're am 'm was were has have had 've
match SBARQ=q < /^WH/=wh < (SQ=sq < (/^(VB|MD)/=aux $+ NP=subj) < (VP=vp < /^VB/=verb))
delete wh
move aux $+ verb
insert (ANS=answer *) >-1 vp
excise sq
relabel q S
end

# what is the capital of France -> the capital of France is <answer>
rule copula
when aux is 's are 're am 'm was were
match SBARQ=q < /^WH/=wh < (SQ=sq < (/^VB/=aux $+ NP=subj) !< VP)
delete wh
move subj $+ aux
insert (ANS=answer *) >-1 sq
excise sq
relabel q S
end

# what is the capital of France -> <answer> is the capital of France
rule copula-fronted
when aux is 's are 're am 'm was were
match SBARQ=q < /^WH/=wh < (SQ=sq < (/^VB/=aux $+ NP=subj) !< VP)
delete wh
insert (ANS=answer *) $+ aux
excise sq
relabel q S
end

# who wrote Hamlet -> <answer> wrote Hamlet
rule wh-subject
match SBARQ=q < (/^WH/=wh $+ (SQ=sq < (VP=vp < /^VB/=verb) !< NP))
insert (ANS=answer *) $+ wh
delete wh
excise sq
relabel q S
end

# what year -> <answer>
rule no-verb
match SBARQ=q < /^WH/=wh !<< /^(VB|MD)/
insert (ANS=answer *) >-1 q
delete wh
relabel q S
end
)fqa";

}  // namespace fluentqa::bundled

#endif  // FLUENTQA_BUNDLED_DATA_HPP_
