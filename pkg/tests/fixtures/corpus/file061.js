// token61 appears in this comment only
var source61 = "token61 inside string";
var pattern61 = /token61+/g;
var tpl61 = `token61 ${ hidden61 } text`;
var ratio61 = total61 / count61;
label61: for (var k61 = 0; k61 < 3; k61++) {
  break label61;
}
