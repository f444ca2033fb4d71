"""Fixed English stopword list (200 words).

Shipped with the package so phrase extraction is fully deterministic and
independent of any external corpus resource.
"""

STOPWORDS = frozenset((
    "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
    "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "came", "can", "cannot", "come", "could", "did",
    "do", "does", "doing", "down", "during", "each", "either", "else", "ever", "every",
    "few", "for", "from", "further", "get", "got", "had", "has", "have", "having",
    "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "if",
    "in", "into", "is", "it", "its", "itself", "just", "like", "made", "make",
    "many", "may", "me", "might", "more", "most", "much", "must", "my", "myself",
    "neither", "never", "no", "nor", "not", "now", "of", "off", "on", "once",
    "only", "onto", "or", "other", "others", "ought", "our", "ours", "ourselves", "out",
    "over", "own", "per", "said", "same", "shall", "she", "should", "since", "so",
    "some", "somehow", "something", "sometimes", "somewhat", "still", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "thus", "to", "too", "toward", "under", "until", "unto", "up", "upon",
    "us", "very", "was", "we", "well", "went", "were", "what", "whatever", "when",
    "whenever", "where", "wherever", "whether", "which", "while", "who", "whoever", "whom", "whose",
    "why", "will", "with", "within", "without", "would", "yet", "you", "your", "yours",
    "yourself", "yourselves", "able", "across", "almost", "along", "already", "although", "always", "among",
    "another", "anyone", "anything", "around", "away", "back", "even", "however", "instead", "meanwhile",
    "moreover", "nevertheless", "nonetheless", "otherwise", "perhaps", "quite", "rather", "really", "therefore", "though",
))
