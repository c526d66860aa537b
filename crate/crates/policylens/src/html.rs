//! Tolerant HTML parsing and a small CSS-like selector engine.
//!
//! Real product and policy pages are full of unclosed tags, stray close
//! tags, and unquoted attributes. The parser here never fails: it recovers
//! from malformed markup and always produces a tree. Selectors support the
//! subset needed by platform profiles: `tag`, `.class`, `#id`, `[attr]`,
//! `[attr=value]`, descendant and child combinators, and comma alternation.



#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
pub enum NodeKind {
    Element { tag: String, attrs: Vec<(String, String)> },
    Text(String),
}

#[derive(Debug, Clone)]
struct Node {
    kind: NodeKind,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct Document {
    nodes: Vec<Node>,
    root: NodeId,
}

const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style", "noscript", "textarea"];

/// Elements that establish block boundaries when flattening to text.
pub const BLOCK_ELEMENTS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "caption", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "html", "li", "main", "nav", "ol", "p", "pre", "section", "table", "tbody",
    "td", "tfoot", "th", "thead", "tr", "ul", "br",
];

pub fn is_block_element(tag: &str) -> bool {
    BLOCK_ELEMENTS.contains(&tag)
}

impl Document {
    /// Parse HTML tolerantly. Never fails; malformed markup is recovered.
    pub fn parse(html: &str) -> Self {
        Parser::new(html).run()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id.0].kind
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn tag(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id.0].kind {
            NodeKind::Element { tag, .. } => Some(tag),
            NodeKind::Text(_) => None,
        }
    }

    pub fn attr(&self, id: NodeId, name: &str) -> Option<&str> {
        match &self.nodes[id.0].kind {
            NodeKind::Element { attrs, .. } => attrs
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(name))
                .map(|(_, v)| v.as_str()),
            NodeKind::Text(_) => None,
        }
    }

    /// All element nodes in document order.
    pub fn elements(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len())
            .map(NodeId)
            .filter(|id| matches!(self.nodes[id.0].kind, NodeKind::Element { .. }))
    }

    /// Walk ancestors from the node's parent up to the root.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let mut current = self.parent(id);
        std::iter::from_fn(move || {
            let next = current?;
            current = self.parent(next);
            Some(next)
        })
    }

    /// Concatenated descendant text with block boundaries as newlines and
    /// inline boundaries as spaces.
    pub fn text_of(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.collect_text(id, &mut out);
        crate::text::normalize_space(&out)
    }

    fn collect_text(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id.0].kind {
            NodeKind::Text(t) => out.push_str(t),
            NodeKind::Element { tag, .. } => {
                if matches!(tag.as_str(), "script" | "style" | "noscript" | "head" | "template") {
                    return;
                }
                for &child in &self.nodes[id.0].children {
                    self.collect_text(child, out);
                    out.push(' ');
                }
            }
        }
    }

    /// Nodes matching a selector list, in document order.
    pub fn select(&self, selector: &str) -> Vec<NodeId> {
        let groups = Selector::parse_list(selector);
        self.elements()
            .filter(|&id| groups.iter().any(|g| g.matches(self, id)))
            .collect()
    }

    /// First match of a selector list.
    pub fn select_first(&self, selector: &str) -> Option<NodeId> {
        self.select(selector).into_iter().next()
    }

    /// Nodes matching `selector` within the subtree rooted at `scope`.
    pub fn select_within(&self, scope: NodeId, selector: &str) -> Vec<NodeId> {
        let groups = Selector::parse_list(selector);
        let mut out = Vec::new();
        let mut stack = vec![scope];
        let mut ordered = Vec::new();
        while let Some(id) = stack.pop() {
            ordered.push(id);
            for &c in self.children(id).iter().rev() {
                stack.push(c);
            }
        }
        for id in ordered {
            if id != scope
                && matches!(self.nodes[id.0].kind, NodeKind::Element { .. })
                && groups.iter().any(|g| g.matches(self, id))
            {
                out.push(id);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
    stack: Vec<NodeId>,
}

impl<'a> Parser<'a> {
    fn new(html: &'a str) -> Self {
        let root = Node {
            kind: NodeKind::Element { tag: "#document".into(), attrs: Vec::new() },
            parent: None,
            children: Vec::new(),
        };
        Self { input: html.as_bytes(), pos: 0, nodes: vec![root], stack: vec![NodeId(0)] }
    }

    fn run(mut self) -> Document {
        let mut text_start = self.pos;
        while self.pos < self.input.len() {
            if self.input[self.pos] == b'<' {
                self.emit_text(text_start, self.pos);
                self.consume_markup();
                text_start = self.pos;
            } else {
                self.pos += 1;
            }
        }
        self.emit_text(text_start, self.input.len());
        Document { nodes: self.nodes, root: NodeId(0) }
    }

    fn emit_text(&mut self, start: usize, end: usize) {
        if start >= end {
            return;
        }
        let raw = std::str::from_utf8(&self.input[start..end]).unwrap_or_default();
        if raw.trim().is_empty() {
            return;
        }
        let text = decode_entities(raw);
        self.append(NodeKind::Text(text));
    }

    fn consume_markup(&mut self) {
        let rest = &self.input[self.pos..];
        if rest.starts_with(b"<!--") {
            self.pos += match find(rest, b"-->") {
                Some(i) => i + 3,
                None => rest.len(),
            };
        } else if rest.starts_with(b"<!") || rest.starts_with(b"<?") {
            self.pos += match memchr(rest, b'>') {
                Some(i) => i + 1,
                None => rest.len(),
            };
        } else if rest.starts_with(b"</") {
            self.consume_close_tag();
        } else if rest.len() > 1 && (rest[1] as char).is_ascii_alphabetic() {
            self.consume_open_tag();
        } else {
            // A bare '<' in text; keep it literal.
            self.pos += 1;
            let id = self.append(NodeKind::Text("<".into()));
            let _ = id;
        }
    }

    fn consume_close_tag(&mut self) {
        let rest = &self.input[self.pos..];
        let end = memchr(rest, b'>').map(|i| i + 1).unwrap_or(rest.len());
        let inner = String::from_utf8_lossy(&rest[2..end.saturating_sub(1)]).to_lowercase();
        let name: String = inner.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
        self.pos += end;
        if name.is_empty() {
            return;
        }
        // Pop to the matching open element if one exists; otherwise ignore.
        if let Some(depth) = self.stack.iter().rposition(|&id| self.tag_of(id) == name) {
            if depth > 0 {
                self.stack.truncate(depth);
            }
        }
    }

    fn consume_open_tag(&mut self) {
        let rest = &self.input[self.pos..];
        let end = memchr(rest, b'>').map(|i| i + 1).unwrap_or(rest.len());
        let raw = String::from_utf8_lossy(&rest[1..end.saturating_sub(1)]).into_owned();
        self.pos += end;

        let self_closing = raw.trim_end().ends_with('/');
        let raw = raw.trim_end().trim_end_matches('/');
        let mut chars = raw.chars().peekable();
        let mut tag = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_alphanumeric() || c == '-' {
                tag.push(c.to_ascii_lowercase());
                chars.next();
            } else {
                break;
            }
        }
        if tag.is_empty() {
            return;
        }
        let attrs = parse_attrs(&chars.collect::<String>());

        self.implicit_close(&tag);
        let id = self.append(NodeKind::Element { tag: tag.clone(), attrs });

        if VOID_ELEMENTS.contains(&tag.as_str()) || self_closing {
            return;
        }
        if RAW_TEXT_ELEMENTS.contains(&tag.as_str()) {
            self.consume_raw_text(&tag, id);
            return;
        }
        self.stack.push(id);
    }

    /// Raw-text elements swallow everything up to their close tag.
    fn consume_raw_text(&mut self, tag: &str, parent: NodeId) {
        let rest = &self.input[self.pos..];
        let close = format!("</{tag}");
        let lower: Vec<u8> = rest.iter().map(|b| b.to_ascii_lowercase()).collect();
        let end = find(&lower, close.as_bytes()).unwrap_or(rest.len());
        let body = String::from_utf8_lossy(&rest[..end]).into_owned();
        if !body.trim().is_empty() {
            let node = Node {
                kind: NodeKind::Text(body),
                parent: Some(parent),
                children: Vec::new(),
            };
            let id = NodeId(self.nodes.len());
            self.nodes.push(node);
            self.nodes[parent.0].children.push(id);
        }
        self.pos += end;
        // Skip the close tag itself.
        let rest = &self.input[self.pos..];
        if let Some(i) = memchr(rest, b'>') {
            self.pos += i + 1;
        } else {
            self.pos = self.input.len();
        }
    }

    /// HTML auto-closing rules for the handful of tags that need them.
    fn implicit_close(&mut self, incoming: &str) {
        loop {
            let top = match self.stack.last() {
                Some(&id) if self.stack.len() > 1 => self.tag_of(id),
                _ => return,
            };
            let close = match top.as_str() {
                "p" => is_block_element(incoming) && incoming != "br",
                "li" => incoming == "li",
                "td" | "th" => matches!(incoming, "td" | "th" | "tr"),
                "tr" => incoming == "tr",
                "dd" | "dt" => matches!(incoming, "dd" | "dt"),
                "option" => incoming == "option",
                _ => false,
            };
            if close {
                self.stack.pop();
            } else {
                return;
            }
        }
    }

    fn tag_of(&self, id: NodeId) -> String {
        match &self.nodes[id.0].kind {
            NodeKind::Element { tag, .. } => tag.clone(),
            NodeKind::Text(_) => String::new(),
        }
    }

    fn append(&mut self, kind: NodeKind) -> NodeId {
        let parent = *self.stack.last().expect("stack never empty");
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node { kind, parent: Some(parent), children: Vec::new() });
        self.nodes[parent.0].children.push(id);
        id
    }
}

fn parse_attrs(raw: &str) -> Vec<(String, String)> {
    let mut attrs = Vec::new();
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        while i < chars.len() && (chars[i].is_whitespace() || chars[i] == '/') {
            i += 1;
        }
        if i >= chars.len() {
            break;
        }
        let mut name = String::new();
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '=' && chars[i] != '>' {
            name.push(chars[i].to_ascii_lowercase());
            i += 1;
        }
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let mut value = String::new();
        if i < chars.len() && chars[i] == '=' {
            i += 1;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '"' || chars[i] == '\'') {
                let quote = chars[i];
                i += 1;
                while i < chars.len() && chars[i] != quote {
                    value.push(chars[i]);
                    i += 1;
                }
                i += 1;
            } else {
                while i < chars.len() && !chars[i].is_whitespace() {
                    value.push(chars[i]);
                    i += 1;
                }
            }
        }
        if !name.is_empty() {
            attrs.push((name, decode_entities(&value)));
        }
    }
    attrs
}

/// Decode the common named entities plus numeric references.
pub fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '&' {
            if let Some(semi) = chars[i + 1..].iter().position(|&c| c == ';') {
                let name: String = chars[i + 1..i + 1 + semi].iter().collect();
                if semi <= 10 {
                    if let Some(decoded) = decode_entity_name(&name) {
                        out.push_str(&decoded);
                        i += semi + 2;
                        continue;
                    }
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn decode_entity_name(name: &str) -> Option<String> {
    if let Some(num) = name.strip_prefix('#') {
        let code = if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
            u32::from_str_radix(hex, 16).ok()?
        } else {
            num.parse::<u32>().ok()?
        };
        return char::from_u32(code).map(|c| c.to_string());
    }
    let ch = match name {
        "amp" => "&",
        "lt" => "<",
        "gt" => ">",
        "quot" => "\"",
        "apos" => "'",
        "nbsp" => " ",
        "copy" => "\u{a9}",
        "reg" => "\u{ae}",
        "trade" => "\u{2122}",
        "mdash" => "\u{2014}",
        "ndash" => "\u{2013}",
        "lsquo" => "\u{2018}",
        "rsquo" => "\u{2019}",
        "ldquo" => "\u{201c}",
        "rdquo" => "\u{201d}",
        "hellip" => "\u{2026}",
        "bull" => "\u{2022}",
        "middot" => "\u{b7}",
        "sect" => "\u{a7}",
        "laquo" => "\u{ab}",
        "raquo" => "\u{bb}",
        "eacute" => "\u{e9}",
        "egrave" => "\u{e8}",
        "agrave" => "\u{e0}",
        "ccedil" => "\u{e7}",
        "auml" => "\u{e4}",
        "ouml" => "\u{f6}",
        "uuml" => "\u{fc}",
        "szlig" => "\u{df}",
        "ntilde" => "\u{f1}",
        "aacute" => "\u{e1}",
        "iacute" => "\u{ed}",
        "oacute" => "\u{f3}",
        "uacute" => "\u{fa}",
        _ => return None,
    };
    Some(ch.to_string())
}

fn memchr(haystack: &[u8], needle: u8) -> Option<usize> {
    haystack.iter().position(|&b| b == needle)
}

fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return None;
    }
    (0..=haystack.len() - needle.len()).find(|&i| &haystack[i..i + needle.len()] == needle)
}

// ---------------------------------------------------------------------------
// Selectors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
struct SimpleSelector {
    tag: Option<String>,
    id: Option<String>,
    classes: Vec<String>,
    attrs: Vec<(String, Option<String>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Combinator {
    Descendant,
    Child,
}

/// A compound selector: a chain of simple selectors joined by combinators,
/// matched right-to-left.
#[derive(Debug, Clone)]
pub struct Selector {
    parts: Vec<(SimpleSelector, Option<Combinator>)>,
}

impl Selector {
    pub fn parse_list(input: &str) -> Vec<Selector> {
        input
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Selector::parse_one)
            .collect()
    }

    fn parse_one(input: &str) -> Selector {
        let mut parts = Vec::new();
        let mut pending: Option<Combinator> = None;
        let mut token = String::new();
        let mut chars = input.chars().peekable();
        let flush = |token: &mut String, pending: &mut Option<Combinator>,
                         parts: &mut Vec<(SimpleSelector, Option<Combinator>)>| {
            if !token.is_empty() {
                parts.push((parse_simple(token), pending.take()));
                token.clear();
            }
        };
        while let Some(c) = chars.next() {
            match c {
                ' ' | '\t' => {
                    flush(&mut token, &mut pending, &mut parts);
                    if pending.is_none() && !parts.is_empty() {
                        pending = Some(Combinator::Descendant);
                    }
                    while matches!(chars.peek(), Some(' ' | '\t')) {
                        chars.next();
                    }
                }
                '>' => {
                    flush(&mut token, &mut pending, &mut parts);
                    pending = Some(Combinator::Child);
                    while matches!(chars.peek(), Some(' ' | '\t')) {
                        chars.next();
                    }
                }
                _ => token.push(c),
            }
        }
        flush(&mut token, &mut pending, &mut parts);
        Selector { parts }
    }

    fn matches(&self, doc: &Document, id: NodeId) -> bool {
        let Some((last, rest)) = self.parts.split_last() else {
            return false;
        };
        if !simple_matches(doc, id, &last.0) {
            return false;
        }
        // Walk leftwards through ancestors.
        let mut need = rest.len();
        let mut combinator = last.1;
        let mut current = id;
        while need > 0 {
            let (sel, next_comb) = &rest[need - 1];
            match combinator.unwrap_or(Combinator::Descendant) {
                Combinator::Child => {
                    let Some(parent) = doc.parent(current) else { return false };
                    if !simple_matches(doc, parent, sel) {
                        return false;
                    }
                    current = parent;
                }
                Combinator::Descendant => {
                    let mut found = None;
                    for anc in doc.ancestors(current) {
                        if simple_matches(doc, anc, sel) {
                            found = Some(anc);
                            break;
                        }
                    }
                    match found {
                        Some(anc) => current = anc,
                        None => return false,
                    }
                }
            }
            combinator = *next_comb;
            need -= 1;
        }
        true
    }
}

fn parse_simple(token: &str) -> SimpleSelector {
    let mut sel = SimpleSelector { tag: None, id: None, classes: Vec::new(), attrs: Vec::new() };
    let mut rest = token;
    // Leading tag name.
    let tag_end = rest
        .char_indices()
        .find(|(_, c)| matches!(c, '.' | '#' | '['))
        .map(|(i, _)| i)
        .unwrap_or(rest.len());
    if tag_end > 0 {
        let tag = &rest[..tag_end];
        if tag != "*" {
            sel.tag = Some(tag.to_lowercase());
        }
        rest = &rest[tag_end..];
    }
    let mut chars = rest.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '.' | '#' => {
                let mut name = String::new();
                while let Some(&n) = chars.peek() {
                    if matches!(n, '.' | '#' | '[') {
                        break;
                    }
                    name.push(n);
                    chars.next();
                }
                if c == '.' {
                    sel.classes.push(name);
                } else {
                    sel.id = Some(name);
                }
            }
            '[' => {
                let mut body = String::new();
                for n in chars.by_ref() {
                    if n == ']' {
                        break;
                    }
                    body.push(n);
                }
                match body.split_once('=') {
                    Some((k, v)) => sel.attrs.push((
                        k.trim().to_lowercase(),
                        Some(v.trim().trim_matches(|q| q == '"' || q == '\'').to_string()),
                    )),
                    None => sel.attrs.push((body.trim().to_lowercase(), None)),
                }
            }
            _ => {}
        }
    }
    sel
}

fn simple_matches(doc: &Document, id: NodeId, sel: &SimpleSelector) -> bool {
    let NodeKind::Element { tag, .. } = doc.kind(id) else {
        return false;
    };
    if let Some(want) = &sel.tag {
        if tag != want {
            return false;
        }
    }
    if let Some(want) = &sel.id {
        if doc.attr(id, "id") != Some(want.as_str()) {
            return false;
        }
    }
    for class in &sel.classes {
        let has = doc
            .attr(id, "class")
            .map(|c| c.split_whitespace().any(|x| x == class))
            .unwrap_or(false);
        if !has {
            return false;
        }
    }
    for (name, value) in &sel.attrs {
        match (doc.attr(id, name), value) {
            (Some(_), None) => {}
            (Some(got), Some(want)) if got == want => {}
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_tree() {
        let doc = Document::parse("<html><body><p>Hello <b>world</b></p></body></html>");
        let ps = doc.select("p");
        assert_eq!(ps.len(), 1);
        assert_eq!(doc.text_of(ps[0]), "Hello world");
    }

    #[test]
    fn recovers_from_unclosed_tags() {
        let doc = Document::parse("<div><p>one<p>two</div><p>three");
        let ps = doc.select("p");
        assert_eq!(ps.len(), 3);
        assert_eq!(doc.text_of(ps[0]), "one");
        assert_eq!(doc.text_of(ps[1]), "two");
    }

    #[test]
    fn ignores_stray_close_tags() {
        let doc = Document::parse("</div><p>ok</p></span>");
        assert_eq!(doc.select("p").len(), 1);
    }

    #[test]
    fn raw_text_not_parsed() {
        let doc = Document::parse("<script>if (a < b) { x('<p>'); }</script><p>real</p>");
        assert_eq!(doc.select("p").len(), 1);
        let body_text = doc.text_of(doc.root());
        assert_eq!(body_text, "real");
    }

    #[test]
    fn attributes_quoted_and_bare() {
        let doc = Document::parse(r#"<a href="/privacy" class="footer-link nav" data-x=7>P</a>"#);
        let a = doc.select("a")[0];
        assert_eq!(doc.attr(a, "href"), Some("/privacy"));
        assert_eq!(doc.attr(a, "data-x"), Some("7"));
        assert_eq!(doc.select("a.footer-link").len(), 1);
        assert_eq!(doc.select("a.nav").len(), 1);
        assert_eq!(doc.select("a.missing").len(), 0);
    }

    #[test]
    fn entities_decoded() {
        let doc = Document::parse("<p>Ben &amp; Jerry&rsquo;s &#65;</p>");
        assert_eq!(doc.text_of(doc.select("p")[0]), "Ben & Jerry\u{2019}s A");
    }

    #[test]
    fn selector_combinators() {
        let doc = Document::parse(
            "<div id=main><ul class=items><li><a href=x>1</a></li></ul></div><a href=y>2</a>",
        );
        assert_eq!(doc.select("#main a").len(), 1);
        assert_eq!(doc.select("ul.items > li").len(), 1);
        assert_eq!(doc.select("div > a").len(), 0);
        assert_eq!(doc.select("a[href]").len(), 2);
        assert_eq!(doc.select("a[href=y]").len(), 1);
        assert_eq!(doc.select("li a, div").len(), 2);
    }

    #[test]
    fn select_within_scopes_to_subtree() {
        let doc = Document::parse("<div class=tile><span>A</span></div><span>B</span>");
        let tile = doc.select(".tile")[0];
        let spans = doc.select_within(tile, "span");
        assert_eq!(spans.len(), 1);
        assert_eq!(doc.text_of(spans[0]), "A");
    }

    #[test]
    fn empty_document_is_fine() {
        let doc = Document::parse("");
        assert_eq!(doc.text_of(doc.root()), "");
    }
}
