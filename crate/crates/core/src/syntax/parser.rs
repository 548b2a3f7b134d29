use super::ast::*;
use super::lexer::{tokenize, Spanned, Token};
use super::{ParseError, ParseErrorKind};

type PResult<T> = Result<T, ParseError>;

/// Parses a whole program. On failure every error found is returned; the
/// parser resynchronizes at declaration and rule boundaries.
pub fn parse_program(text: &str) -> Result<ProgramAst, Vec<ParseError>> {
    let (tokens, mut errors) = tokenize(text);
    let mut parser = Parser::new(tokens);
    let program = parser.program();
    errors.append(&mut parser.errors);
    if errors.is_empty() {
        Ok(program)
    } else {
        errors.sort_by_key(|e| (e.span.line, e.span.column));
        Err(errors)
    }
}

/// Parses a single entity declaration such as `l30 : Light { room : 101 }`.
/// The leading `entity` keyword is optional.
pub fn parse_entity_decl(text: &str) -> Result<EntityDecl, Vec<ParseError>> {
    let (tokens, mut errors) = tokenize(text);
    let mut parser = Parser::new(tokens);
    let result = parser.entity_decl().and_then(|decl| {
        parser.expect(Token::Eof, "end of input")?;
        Ok(decl)
    });
    match result {
        Ok(decl) if errors.is_empty() => Ok(decl),
        Ok(_) => Err(errors),
        Err(e) => {
            errors.push(e);
            Err(errors)
        }
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn new(tokens: Vec<Spanned>) -> Self {
        Self { tokens, pos: 0, errors: Vec::new() }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].token
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Spanned {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == token {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = self.peek();
        let kind =
            if *found == Token::Eof { ParseErrorKind::UnterminatedBlock } else { ParseErrorKind::UnexpectedToken };
        ParseError::new(kind, format!("expected {expected}, found {}", found.describe()), self.span())
    }

    fn expect(&mut self, token: Token, expected: &str) -> PResult<SourceSpan> {
        if *self.peek() == token {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Token::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident::spanned(name, span))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    // ---- specification layer -------------------------------------------------

    fn program(&mut self) -> ProgramAst {
        let mut program = ProgramAst::default();
        loop {
            match self.peek() {
                Token::Eof => return program,
                Token::Rules => break,
                Token::Interface => match self.interface_decl() {
                    Ok(decl) => program.spec.interfaces.push(decl),
                    Err(e) => self.recover_top_level(e),
                },
                Token::Semi => {
                    self.bump();
                }
                _ => match self.entity_decl() {
                    Ok(decl) => program.spec.entities.push(decl),
                    Err(e) => self.recover_top_level(e),
                },
            }
        }
        self.rules_block(&mut program.rules);
        if *self.peek() != Token::Eof {
            let e = self.unexpected("end of input after the rule block");
            self.errors.push(e);
        }
        program
    }

    fn recover_top_level(&mut self, error: ParseError) {
        self.errors.push(error);
        loop {
            match self.peek() {
                Token::Eof | Token::Interface | Token::Entity | Token::Rules => return,
                Token::RBrace => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn interface_decl(&mut self) -> PResult<InterfaceDecl> {
        let span = self.expect(Token::Interface, "`interface`")?;
        let name = self.ident("interface name")?;
        self.expect(Token::LBrace, "`{`")?;
        let mut decl = InterfaceDecl { name, attributes: Vec::new(), events: Vec::new(), actions: Vec::new(), span };
        loop {
            match self.peek() {
                Token::RBrace => {
                    self.bump();
                    return Ok(decl);
                }
                Token::Semi => {
                    self.bump();
                }
                Token::Attribute => {
                    self.bump();
                    let name = self.ident("attribute name")?;
                    self.expect(Token::Colon, "`:`")?;
                    let ty = self.type_tag()?;
                    decl.attributes.push(MemberDecl { name, ty });
                }
                Token::Event => {
                    self.bump();
                    let name = self.ident("event name")?;
                    self.expect(Token::Colon, "`:`")?;
                    let ty = self.type_tag()?;
                    decl.events.push(MemberDecl { name, ty });
                }
                Token::Action => {
                    self.bump();
                    let name = self.ident("action name")?;
                    self.expect(Token::LParen, "`(`")?;
                    let ty = self.type_tag()?;
                    self.expect(Token::RParen, "`)`")?;
                    decl.actions.push(MemberDecl { name, ty });
                }
                _ => return Err(self.unexpected("`attribute`, `event`, `action` or `}`")),
            }
        }
    }

    fn type_tag(&mut self) -> PResult<TypeTag> {
        let ident = self.ident("a type (`Integer` or `Boolean`)")?;
        match ident.as_str() {
            "Integer" | "nat" => Ok(TypeTag::Nat),
            "Boolean" | "bool" => Ok(TypeTag::Bool),
            other => Err(ParseError::new(
                ParseErrorKind::UnexpectedToken,
                format!("unknown type `{other}`, expected `Integer` or `Boolean`"),
                ident.span,
            )),
        }
    }

    fn entity_decl(&mut self) -> PResult<EntityDecl> {
        let keyword = self.eat(&Token::Entity);
        let span = self.span();
        let name = self.ident(if keyword { "entity name" } else { "a declaration" })?;
        self.expect(Token::Colon, "`:`")?;
        let interface = self.ident("interface name")?;
        self.expect(Token::LBrace, "`{`")?;
        let mut inits = Vec::new();
        loop {
            match self.peek() {
                Token::RBrace => {
                    self.bump();
                    break;
                }
                Token::Semi | Token::Comma => {
                    self.bump();
                }
                _ => {
                    let attribute = self.ident("attribute name or `}`")?;
                    if !self.eat(&Token::Colon) && !self.eat(&Token::Eq) {
                        return Err(self.unexpected("`:` or `=`"));
                    }
                    let value = self.literal()?;
                    inits.push(EntityInit { attribute, value });
                }
            }
        }
        Ok(EntityDecl { name, interface, inits, span })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let span = self.span();
        let kind = match self.peek() {
            Token::Num(n) => LiteralKind::Nat(*n),
            Token::True => LiteralKind::Bool(true),
            Token::False => LiteralKind::Bool(false),
            _ => return Err(self.unexpected("a numeral, `true` or `false`")),
        };
        self.bump();
        Ok(Literal { kind, span })
    }

    // ---- orchestration layer -------------------------------------------------

    fn rules_block(&mut self, rules: &mut Vec<RuleAst>) {
        if let Err(e) = self.expect(Token::Rules, "`rules`") {
            self.errors.push(e);
            return;
        }
        loop {
            match self.peek() {
                Token::End => {
                    self.bump();
                    return;
                }
                Token::Semi => {
                    self.bump();
                }
                Token::Eof => {
                    let e = ParseError::new(
                        ParseErrorKind::UnterminatedBlock,
                        "rule block is missing its closing `end`",
                        self.span(),
                    );
                    self.errors.push(e);
                    return;
                }
                _ => match self.rule() {
                    Ok(rule) => rules.push(rule),
                    Err(e) => {
                        self.errors.push(e);
                        // skip to the end of the broken rule
                        while !matches!(self.peek(), Token::End | Token::Eof) {
                            self.bump();
                        }
                        self.eat(&Token::End);
                    }
                },
            }
        }
    }

    fn rule(&mut self) -> PResult<RuleAst> {
        let mut label = None;
        if *self.peek() == Token::LParen {
            self.bump();
            match self.peek().clone() {
                Token::Num(n) if n <= u32::MAX as u64 => {
                    self.bump();
                    label = Some(n as u32);
                }
                Token::Num(_) => {
                    return Err(ParseError::new(
                        ParseErrorKind::MalformedLiteral,
                        "rule label is too large",
                        self.span(),
                    ))
                }
                _ => return Err(self.unexpected("a rule number")),
            }
            self.expect(Token::RParen, "`)`")?;
        }
        let span = self.expect(Token::When, "`when`")?;
        let condition = self.event_or()?;
        self.expect(Token::Trigger, "`trigger`")?;
        let body = self.action_par()?;
        self.expect(Token::End, "`end` closing the rule")?;
        Ok(RuleAst { label, condition, body, span })
    }

    fn event_or(&mut self) -> PResult<EventExpr> {
        let mut lhs = self.event_and()?;
        while self.eat(&Token::Or) {
            let rhs = self.event_and()?;
            lhs = EventExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn event_and(&mut self) -> PResult<EventExpr> {
        let mut lhs = self.event_primary()?;
        while self.eat(&Token::And) {
            let rhs = self.event_primary()?;
            lhs = EventExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn event_primary(&mut self) -> PResult<EventExpr> {
        match self.peek() {
            Token::LParen => {
                self.bump();
                let inner = self.event_or()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::All => {
                let span = self.bump().span;
                let inner = self.event_primary()?;
                self.expect(Token::GroupBy, "`groupby`")?;
                let group_by = self.ident("grouping attribute")?;
                Ok(EventExpr::Aggregate { inner: Box::new(inner), group_by, span })
            }
            Token::Event => {
                let span = self.bump().span;
                let event = self.ident("event name")?;
                self.expect(Token::From, "`from`")?;
                let decl = self.decl()?;
                let filter = self.filter()?;
                self.expect(Token::Value, "`value`")?;
                let test = if self.eat(&Token::Changed) {
                    BoolTestAst::ValueChanged
                } else if self.eat(&Token::Eq) {
                    BoolTestAst::ValueEq(self.expr()?)
                } else {
                    return Err(self.unexpected("`changed` or `=`"));
                };
                Ok(EventExpr::Atom(EventAtom { event, decl, filter, test, span }))
            }
            _ => Err(self.unexpected("`event`, `all` or `(`")),
        }
    }

    fn action_par(&mut self) -> PResult<ActionExpr> {
        let mut lhs = self.action_seq()?;
        while self.eat(&Token::ParBar) {
            let rhs = self.action_seq()?;
            lhs = ActionExpr::Par(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn action_seq(&mut self) -> PResult<ActionExpr> {
        let mut lhs = self.action_primary()?;
        while self.eat(&Token::Comma) {
            let rhs = self.action_primary()?;
            lhs = ActionExpr::Seq(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn action_primary(&mut self) -> PResult<ActionExpr> {
        match self.peek() {
            Token::LParen => {
                self.bump();
                let inner = self.action_par()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Action => {
                let span = self.bump().span;
                let action = self.ident("action name")?;
                self.expect(Token::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                self.expect(Token::On, "`on`")?;
                let decl = self.decl()?;
                let filter = self.filter()?;
                Ok(ActionExpr::Call(ActionCall { action, arg, decl, filter, span }))
            }
            _ => Err(self.unexpected("`action` or `(`")),
        }
    }

    fn decl(&mut self) -> PResult<DeclAst> {
        let var = self.ident("an entity variable or entity name")?;
        if *self.peek() == Token::Colon && matches!(self.peek_at(1), Token::Ident(_)) {
            self.bump();
            let interface = self.ident("interface name")?;
            Ok(DeclAst::Typed { var, interface })
        } else {
            Ok(DeclAst::Bare(var))
        }
    }

    fn filter(&mut self) -> PResult<Option<FilterAst>> {
        if !self.eat(&Token::With) {
            return Ok(None);
        }
        let attribute = self.ident("attribute name")?;
        self.expect(Token::Eq, "`=`")?;
        let rhs = self.expr()?;
        Ok(Some(FilterAst { attribute, rhs }))
    }

    fn expr(&mut self) -> PResult<ExprAst> {
        let span = self.span();
        match self.peek().clone() {
            Token::Num(n) => {
                self.bump();
                Ok(ExprAst::Num(n, span))
            }
            Token::True => {
                self.bump();
                Ok(ExprAst::Bool(true, span))
            }
            Token::False => {
                self.bump();
                Ok(ExprAst::Bool(false, span))
            }
            Token::Ident(_) => {
                let var = self.ident("entity variable")?;
                self.expect(Token::Dot, "`.` in a member path")?;
                let member = self.ident("member name")?;
                Ok(ExprAst::Path { var, member })
            }
            _ => Err(self.unexpected("a numeral, `true`, `false` or `var.member`")),
        }
    }
}
