// token58 appears in this comment only
var source58 = "token58 inside string";
var pattern58 = /token58+/g;
var tpl58 = `token58 ${ hidden58 } text`;
var ratio58 = total58 / count58;
label58: for (var k58 = 0; k58 < 3; k58++) {
  break label58;
}
